//! Semigroup constructions from resolvent access: the contour action 𝒢(φ)x,
//! the Weyl construction 𝒢_α, the mollified semigroup S(t), C_τ, ACP trajectories
//! and the closed forms of the multiplication and Robin examples.

use crate::contour::{Contour, IntegralVec};
use crate::error::{invalid, Error, Result};
use crate::operators::{sup_norm, Matrix, Multiplication, ResolventOperator, RobinLaplacian};
use crate::quad::{composite_gl, gl16, singular_left};
use crate::testfn::{weyl_derivative, TestFunction};
use crate::weights::{CanonicalProduct, WeightSequence, DEFAULT_P_TRUNC};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::sync::Arc;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Largest accepted |integrand(last node)| / peak.
pub const DECAY_TOLERANCE: f64 = 1e-10;

/// Default mollifier exponent.
pub const DEFAULT_N_TOT: u32 = 4;

/// Prefactor of the contour action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// 1/(2πi): 𝒢(φ) = ∫φ(t)e^{tA}C dt whenever the classical semigroup exists.
    #[default]
    InverseLaplace,
    /// -i, which is 2π times the inverse-Laplace value.
    MinusI,
}

impl Normalization {
    pub fn factor(self) -> C {
        match self {
            Normalization::InverseLaplace => C::new(0.0, -1.0 / (2.0 * PI)),
            Normalization::MinusI => C::new(0.0, -1.0),
        }
    }
}

/// Deliberate defects used by the negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    #[default]
    None,
    /// Negate the quadrature weight of every node with Im λ > 0.
    FlipUpperWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    DistributionAction,
    PointwiseSemigroup,
}

#[derive(Debug, Clone)]
pub struct Mollifier {
    pub product: CanonicalProduct,
    pub n_tot: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tail_estimate: f64,
    pub quad_error: f64,
    pub end_ratio: f64,
    pub nodes: usize,
}

impl From<&IntegralVec> for Diagnostics {
    fn from(r: &IntegralVec) -> Self {
        Self { tail_estimate: r.tail_estimate, quad_error: r.quad_error, end_ratio: r.end_ratio, nodes: r.nodes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub value: Vec<C>,
    pub diagnostics: Diagnostics,
}

/// An operator, a contour and an optional mollifier.
#[derive(Clone)]
pub struct SemigroupAction {
    op: Arc<dyn ResolventOperator>,
    contour: Contour,
    mollifier: Option<Mollifier>,
    normalization: Normalization,
    corruption: Corruption,
}

fn check_decay(r: &IntegralVec, what: &str) -> Result<()> {
    if r.end_ratio > DECAY_TOLERANCE {
        return Err(Error::DecayCheck {
            ratio: r.end_ratio,
            hint: format!("{what}: increase T, the mollifier exponent, or move the contour"),
        });
    }
    Ok(())
}

fn scale(v: &mut [C], s: C) {
    for z in v {
        *z *= s;
    }
}

impl SemigroupAction {
    /// distribution_action mode: φ ↦ 𝒢(φ)x.
    pub fn distribution(op: Arc<dyn ResolventOperator>, contour: Contour) -> Self {
        Self { op, contour, mollifier: None, normalization: Normalization::default(), corruption: Corruption::None }
    }

    /// pointwise_semigroup mode: t ↦ S(t)x with mollifier ω(iλ)^{-n_tot}.
    pub fn pointwise(op: Arc<dyn ResolventOperator>, contour: Contour, weights: &WeightSequence, n_tot: u32) -> Result<Self> {
        if n_tot == 0 {
            return invalid("pointwise semigroup needs n_tot ≥ 1");
        }
        let product = weights.canonical_product(DEFAULT_P_TRUNC.min(weights.p_max()))?;
        Ok(Self {
            op,
            contour,
            mollifier: Some(Mollifier { product, n_tot }),
            normalization: Normalization::default(),
            corruption: Corruption::None,
        })
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn with_corruption(mut self, c: Corruption) -> Self {
        self.corruption = c;
        self
    }

    pub fn with_contour(mut self, contour: Contour) -> Self {
        self.contour = contour;
        self
    }

    pub fn op(&self) -> &Arc<dyn ResolventOperator> {
        &self.op
    }
    pub fn contour(&self) -> &Contour {
        &self.contour
    }
    pub fn mode(&self) -> Mode {
        if self.mollifier.is_some() {
            Mode::PointwiseSemigroup
        } else {
            Mode::DistributionAction
        }
    }
    pub fn mollifier(&self) -> Option<&Mollifier> {
        self.mollifier.as_ref()
    }
    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    fn sign(&self, lambda: C) -> f64 {
        match self.corruption {
            Corruption::FlipUpperWeights if lambda.im > 0.0 => -1.0,
            _ => 1.0,
        }
    }

    fn require(&self, mode: Mode) -> Result<()> {
        if self.mode() != mode {
            return Err(Error::Mode(format!("operation needs {mode:?} mode, action is in {:?}", self.mode())));
        }
        Ok(())
    }

    /// 𝒢(φ)x = N ∫_Γ φ̂(λ) R(λ) C x dλ with N the normalization factor.
    pub fn gd_action(&self, phi: &TestFunction, x: &[C]) -> Result<Output> {
        self.require(Mode::DistributionAction)?;
        let n = self.op.dim();
        if x.len() != n {
            return invalid("state length does not match the operator");
        }
        if x.iter().all(|v| *v == ZERO) {
            let diagnostics = Diagnostics { tail_estimate: 0.0, quad_error: 0.0, end_ratio: 0.0, nodes: self.contour.len() };
            return Ok(Output { value: vec![ZERO; n], diagnostics });
        }
        let cx = self.op.regularizer().apply(x);
        let r = self.contour.integrate_vec(n, |_, l| {
            let mut v = self.op.resolvent(l, &cx)?;
            scale(&mut v, phi.laplace_hat(l) * self.sign(l));
            Ok(v)
        })?;
        check_decay(&r, "distribution action")?;
        let mut value = r.value.clone();
        scale(&mut value, self.normalization.factor());
        Ok(Output { value, diagnostics: (&r).into() })
    }

    /// Matrices of x ↦ 𝒢(φ_i)x on the admissible basis vectors, from one contour pass.
    ///
    /// Basis vectors outside the resolvent's domain (the left derivative needs
    /// f(0) = 0) are dropped and reported.
    pub fn gd_matrices(&self, phis: &[TestFunction]) -> Result<ActionMatrices> {
        self.require(Mode::DistributionAction)?;
        let n = self.op.dim();
        let probe = self.contour.nodes().first().map(|nd| nd.lambda).unwrap_or(C::new(1.0, 0.0));
        let mut admissible = Vec::with_capacity(n);
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = C::new(1.0, 0.0);
            let c = self.op.regularizer().apply(&e);
            match self.op.resolvent(probe, &c) {
                Ok(_) => {
                    admissible.push(j);
                    cols.push(c);
                }
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let m = cols.len();
        let r = self.contour.integrate_vec(phis.len() * n * m, |_, l| {
            let rc: Vec<Vec<C>> = cols.iter().map(|c| self.op.resolvent(l, c)).collect::<Result<_>>()?;
            let mut out = Vec::with_capacity(phis.len() * n * m);
            for phi in phis {
                let s = phi.laplace_hat(l) * self.sign(l);
                for v in &rc {
                    out.extend(v.iter().map(|z| z * s));
                }
            }
            Ok(out)
        })?;
        check_decay(&r, "distribution action")?;
        let f = self.normalization.factor();
        let matrices = r.value.chunks(n * m.max(1)).take(phis.len()).map(|c| DMatrix::from_column_slice(n, m, c).map(|v| v * f)).collect();
        Ok(ActionMatrices { matrices, admissible })
    }

    fn mollified_integral(&self, ts: &[C], p: u32, x: &[C], what: &str) -> Result<(Vec<Vec<C>>, Diagnostics)> {
        self.require(Mode::PointwiseSemigroup)?;
        let m = self.mollifier.as_ref().expect("pointwise mode");
        let n = self.op.dim();
        if x.len() != n {
            return invalid("state length does not match the operator");
        }
        let r = self.contour.integrate_vec(n * ts.len(), |_, l| {
            let rx = self.op.resolvent(l, x)?;
            let base = m.product.mollifier(l, m.n_tot) * l.powu(p) * self.sign(l);
            let mut out = Vec::with_capacity(n * ts.len());
            for &t in ts {
                let s = base * (l * t).exp();
                out.extend(rx.iter().map(|v| v * s));
            }
            Ok(out)
        })?;
        check_decay(&r, what)?;
        let f = C::new(0.0, -1.0 / (2.0 * PI));
        let states = r.value.chunks(n).map(|c| c.iter().map(|v| v * f).collect()).collect();
        Ok((states, (&r).into()))
    }

    /// S(t)x = (2πi)^{-1} ∫_Γ e^{λt} R(λ)x / ω(iλ)^{n_tot} dλ for each t.
    pub fn mollified_semigroup(&self, ts: &[C], x: &[C]) -> Result<Vec<Vec<C>>> {
        self.mollified_integral(ts, 0, x, "mollified semigroup").map(|r| r.0)
    }

    pub fn mollified_semigroup_at(&self, t: C, x: &[C]) -> Result<Output> {
        let (mut v, d) = self.mollified_integral(&[t], 0, x, "mollified semigroup")?;
        Ok(Output { value: v.remove(0), diagnostics: d })
    }

    /// d^p/dt^p S(t)x.
    pub fn semigroup_derivative(&self, p: u32, ts: &[C], x: &[C]) -> Result<Vec<Vec<C>>> {
        self.mollified_integral(ts, p, x, "semigroup derivative").map(|r| r.0)
    }

    /// C_τ = S(0) assembled column by column, with its extreme singular values.
    pub fn regularizer(&self) -> Result<RegularizerReport> {
        self.require(Mode::PointwiseSemigroup)?;
        let n = self.op.dim();
        let m = self.mollifier.as_ref().expect("pointwise mode");
        let r = self.contour.integrate_vec(n * n, |_, l| {
            let s = m.product.mollifier(l, m.n_tot) * self.sign(l);
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                let mut e = vec![ZERO; n];
                e[j] = C::new(1.0, 0.0);
                let mut v = self.op.resolvent(l, &e)?;
                scale(&mut v, s);
                out.extend(v);
            }
            Ok(out)
        })?;
        check_decay(&r, "regularizer")?;
        let f = C::new(0.0, -1.0 / (2.0 * PI));
        let c = DMatrix::from_column_slice(n, n, &r.value).map(|v| v * f);
        let sv = c.clone().svd(false, false).singular_values;
        let (smin, smax) = (sv.min(), sv.max());
        let warning = (smin < 1e-12).then(|| "regularizer numerically non-injective at this discretization".to_string());
        Ok(RegularizerReport { matrix: c, sigma_min: smin, sigma_max: smax, warning })
    }

    /// u(t_j) = S(t_j)y with finite-difference residuals ‖u' - Au‖/‖u‖.
    pub fn acp_solve(&self, y: &[C], times: &[f64]) -> Result<Trajectory> {
        if times.iter().any(|t| *t < 0.0) || times.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("times must be nonnegative and strictly increasing");
        }
        const H: f64 = 1e-3;
        let mut ts = Vec::with_capacity(3 * times.len());
        for &t in times {
            let (a, b) = if t >= H { (t - H, t + H) } else { (t, t + H) };
            ts.extend([C::new(t, 0.0), C::new(a, 0.0), C::new(b, 0.0)]);
        }
        let states = self.mollified_semigroup(&ts, y)?;
        let mut out = Vec::with_capacity(times.len());
        let mut residuals = Vec::with_capacity(times.len());
        let inner = self.op.interior();
        for (j, &t) in times.iter().enumerate() {
            let u = &states[3 * j];
            let (ua, ub) = (&states[3 * j + 1], &states[3 * j + 2]);
            let step = if t >= H { 2.0 * H } else { H };
            let du: Vec<C> = ua.iter().zip(ub).map(|(a, b)| (b - a) / step).collect();
            let au = self.op.apply(u)?;
            let nu = sup_norm(&u[inner.clone()]);
            let res = inner.clone().fold(0.0f64, |m, i| m.max((du[i] - au[i]).norm()));
            residuals.push(if nu > 0.0 { res / nu } else { 0.0 });
            out.push(u.clone());
        }
        Ok(Trajectory { times: times.to_vec(), states: out, residuals })
    }
}

#[derive(Debug, Clone)]
pub struct ActionMatrices {
    pub matrices: Vec<DMatrix<C>>,
    /// Basis indices kept as columns.
    pub admissible: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RegularizerReport {
    pub matrix: DMatrix<C>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C>>,
    pub residuals: Vec<f64>,
}

// ---------------------------------------------------------------------------
// matrix oracles

/// ∫φ(t) e^{tA} x dt by composite Gauss–Legendre and matrix exponentials.
pub fn classical_action(op: &Matrix, phi: &TestFunction, x: &[C]) -> Vec<C> {
    let (t0, t1) = phi.support();
    let xv = DVector::from_column_slice(x);
    let panels = 48;
    let h = (t1 - t0) / panels as f64;
    let mut acc = DVector::<C>::zeros(x.len());
    for k in 0..panels {
        for (t, w) in gl16().on(t0 + k as f64 * h, t0 + (k + 1) as f64 * h) {
            acc += (op.exp(C::new(t, 0.0)) * &xv) * C::new(w * phi.eval(t), 0.0);
        }
    }
    acc.as_slice().to_vec()
}

/// E(t, μ) = s_α(t, μ)/t^α = (1/Γ(α)) ∫_0^1 v^{α-1} e^{t(1-v)μ} dv, α > 0.
fn integrated_factor(alpha: f64, t: f64, mu: C) -> C {
    integrated_factor_with(&singular_left(40, alpha - 1.0, 1.0), alpha, t, mu)
}

fn integrated_factor_with(rule: &[(f64, f64)], alpha: f64, t: f64, mu: C) -> C {
    let s: C = rule.iter().map(|&(v, w)| (mu * (t * (1.0 - v))).exp() * w).sum();
    s / gamma(alpha)
}

/// S_α(t) = (1/Γ(α)) ∫_0^t (t-s)^{α-1} e^{sA} ds, S_0(t) = e^{tA}.
pub fn integrated_semigroup_oracle(op: &Matrix, alpha: f64, t: f64) -> Result<DMatrix<C>> {
    if !(alpha >= 0.0) || !(t >= 0.0) {
        return invalid("integrated semigroup needs α ≥ 0 and t ≥ 0");
    }
    let e = op.eigen()?;
    let d: Vec<C> = e
        .values
        .iter()
        .map(|&mu| {
            if alpha == 0.0 {
                (mu * t).exp()
            } else if t == 0.0 {
                ZERO
            } else {
                integrated_factor(alpha, t, mu) * t.powf(alpha)
            }
        })
        .collect();
    Ok(&e.vectors * DMatrix::from_diagonal(&DVector::from_vec(d)) * &e.inverse)
}

/// Quadrature for 𝒢_α(φ)x = ∫_0^∞ W₊^α φ(t) S_α(t) x dt with the Weyl
/// derivative tabulated once, so one rule serves many operators.
#[derive(Debug, Clone)]
pub struct GalphaRule {
    alpha: f64,
    /// (t, w·t^α·W^αφ(t)); the t^α factor is folded in.
    nodes: Vec<(f64, f64)>,
    inner: Vec<(f64, f64)>,
}

impl GalphaRule {
    pub fn new(alpha: f64, phi: &TestFunction) -> Result<Self> {
        let (t0, t1) = phi.support();
        if !(t0 > 0.0) {
            return invalid("𝒢_α needs supp φ ⊂ (0, ∞)");
        }
        if !(0.0..=4.0).contains(&alpha) {
            return invalid("𝒢_α is served for α ∈ [0, 4]");
        }
        let integer = (alpha - alpha.round()).abs() < 1e-14;
        let mut nodes = Vec::new();
        if !integer {
            // W^αφ is nonzero left of the support; t^α is absorbed by the rule
            for (t, w) in singular_left(40, alpha, t0) {
                nodes.push((t, w * weyl_derivative(phi, alpha, t)?));
            }
        }
        let panels = 32;
        let h = (t1 - t0) / panels as f64;
        for k in 0..panels {
            for (t, w) in gl16().on(t0 + k as f64 * h, t0 + (k + 1) as f64 * h) {
                nodes.push((t, w * t.powf(alpha) * weyl_derivative(phi, alpha, t)?));
            }
        }
        nodes.retain(|n| n.1 != 0.0);
        let inner = if alpha > 0.0 { singular_left(40, alpha - 1.0, 1.0) } else { Vec::new() };
        Ok(Self { alpha, nodes, inner })
    }

    pub fn apply(&self, op: &Matrix, x: &[C]) -> Result<Vec<C>> {
        let e = op.eigen()?;
        if x.len() != e.values.len() {
            return invalid("state length does not match the operator");
        }
        let y = &e.inverse * DVector::from_column_slice(x);
        let coeff: Vec<C> = e
            .values
            .iter()
            .map(|&mu| {
                self.nodes
                    .iter()
                    .map(|&(t, w)| w * if self.alpha == 0.0 { (mu * t).exp() } else { integrated_factor_with(&self.inner, self.alpha, t, mu) })
                    .sum::<C>()
            })
            .collect();
        let out = &e.vectors * DVector::from_iterator(coeff.len(), coeff.iter().zip(y.iter()).map(|(c, y)| c * y));
        Ok(out.as_slice().to_vec())
    }
}

/// 𝒢_α(φ)x for φ supported in (0, ∞).
pub fn galpha_action(op: &Matrix, alpha: f64, phi: &TestFunction, x: &[C]) -> Result<Vec<C>> {
    GalphaRule::new(alpha, phi)?.apply(op, x)
}

// ---------------------------------------------------------------------------
// abstract Beurling norm

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeurlingReport {
    pub value: f64,
    pub argmax: usize,
    pub terms: Vec<f64>,
    /// The last five terms are non-increasing.
    pub stabilized: bool,
}

/// sup_{p ≤ p_max} h^p ‖A^p x‖_k / M_p.
pub fn beurling_norm(op: &dyn ResolventOperator, x: &[C], w: &WeightSequence, h: f64, k: usize, p_max: usize) -> Result<BeurlingReport> {
    if p_max > 40 {
        return invalid("beurling norm supports p_max ≤ 40");
    }
    if p_max > w.p_max() {
        return invalid("p_max exceeds the weight sequence");
    }
    let semi = op.seminorms();
    let mut v = x.to_vec();
    let mut terms = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        if p > 0 {
            v = op.apply(&v)?;
        }
        terms.push((p as f64 * h.ln() - w.ln_m(p)).exp() * semi.norm(&v, k));
    }
    let (argmax, value) = terms.iter().enumerate().fold((0, 0.0), |(i, m), (j, &t)| if t > m { (j, t) } else { (i, m) });
    let tail = &terms[terms.len().saturating_sub(5)..];
    let stabilized = tail.windows(2).all(|w| w[1] <= w[0]);
    Ok(BeurlingReport { value, argmax, terms, stabilized })
}

// ---------------------------------------------------------------------------
// closed forms

/// (2π)^{-1} φ̂(a(x)) f(x) for the multiplication example.
pub fn closed_form_mult(op: &Multiplication, phi: &TestFunction, f: &[C]) -> Result<Vec<C>> {
    if f.len() != op.symbol().len() {
        return invalid("state length does not match the grid");
    }
    Ok(op.symbol().iter().zip(f).map(|(&a, &v)| phi.laplace_hat(a) * v / (2.0 * PI)).collect())
}

/// Kernel representation of 𝒢(φ)f for the Robin example: the Gaussian
/// free-space part plus the boundary term as a vertical-line integral.
///
/// The y-integrals use the trapezoid rule on the grid, so f must vanish
/// smoothly at both ends of the grid.
pub fn closed_form_robin_kernel(op: &RobinLaplacian, phi: &TestFunction, f: &[C], abscissa: f64, t_max: f64, nodes: usize) -> Result<Vec<C>> {
    let (t0, t1) = phi.support();
    if !(t0 > 0.0) {
        return invalid("Robin kernel representation needs supp φ ⊂ (0, ∞)");
    }
    let grid = op.grid().expect("Robin operator has a grid");
    let n = grid.len();
    if f.len() != n {
        return invalid("state length does not match the grid");
    }
    let h = grid.spacing();
    let c0 = op.c0();
    let rot = op.rotation();
    // Φ(z) = ∫ φ(t) (4π c₀ ρ t)^{-1/2} exp(-z²/(4 c₀ ρ t)) dt, ρ = r e^{iθ}
    let panels = 64;
    let ph = (t1 - t0) / panels as f64;
    let tq: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| gl16().on(t0 + k as f64 * ph, t0 + (k + 1) as f64 * ph).collect::<Vec<_>>())
        .map(|(t, w)| (t, w * phi.eval(t)))
        .collect();
    let kernel: Vec<C> = (0..n)
        .map(|m| {
            let z = m as f64 * h;
            tq.iter()
                .map(|&(t, w)| {
                    let q = rot * (4.0 * c0 * t);
                    (-(z * z) / q).exp() / (q * PI).sqrt() * w
                })
                .sum()
        })
        .collect();
    let mut out: Vec<C> = (0..n)
        .map(|j| (0..n).map(|i| kernel[j.abs_diff(i)] * f[i]).sum::<C>() * h)
        .collect();
    // boundary term
    let contour = Contour::vertical_line(abscissa, t_max, nodes)?;
    let pts = grid.points();
    let r = contour.integrate_vec(n, |_, l| {
        let k = op.wavenumber(l)?;
        let lf: C = pts.iter().zip(f).map(|(&v, &fv)| (-k * v).exp() * fv).sum::<C>() * h;
        let s = phi.laplace_hat(l) * op.boundary_factor(k) * lf / (rot * 2.0 * c0 * k);
        Ok(pts.iter().map(|&x| (-k * x).exp() * s).collect())
    })?;
    check_decay(&r, "Robin boundary term")?;
    let fac = C::new(0.0, -1.0 / (2.0 * PI));
    for (o, b) in out.iter_mut().zip(&r.value) {
        *o += b * fac;
    }
    Ok(out)
}

/// ∫_0^t g(s) ds for a callback on [0, t] by composite Gauss–Legendre.
pub fn time_integral(t: f64, panels: usize, g: impl Fn(f64) -> f64) -> f64 {
    composite_gl(0.0, t, panels, g)
}
