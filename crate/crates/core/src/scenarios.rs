//! Pre-baked runs: matrix batteries, the Weyl and mollifier checks, and the
//! multiplication, left-derivative and Robin examples.

use crate::contour::Contour;
use crate::engine::{closed_form_mult, closed_form_robin_kernel, GalphaRule, SemigroupAction, DEFAULT_N_TOT};
use crate::error::Result;
use crate::operators::{sup_norm, Grid, LeftDerivative, Matrix, Multiplication, ResolventOperator, RobinLaplacian};
use crate::testfn::{weyl_compose, weyl_derivative, ExpDecay, TestFunction};
use crate::verify::{self, relative_residual, CheckReport, ControlOutcome, Tolerances};
use crate::weights::{WeightSequence, DEFAULT_P_TRUNC};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub reports: Vec<CheckReport>,
    pub tables: BTreeMap<String, Table>,
    pub summary: BTreeMap<String, f64>,
}

impl Scenario {
    fn new(name: &str) -> Self {
        Self { name: name.into(), reports: Vec::new(), tables: BTreeMap::new(), summary: BTreeMap::new() }
    }
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
    /// Largest residual over all reports.
    pub fn worst(&self) -> f64 {
        self.reports.iter().map(|r| r.worst()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Overrides the default node count of every contour used.
    pub nodes: Option<usize>,
    pub tol: Tolerances,
    /// Multiplies the fixed example tolerances; `tol` is expected to be scaled alike.
    pub tol_scale: f64,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { nodes: None, tol: Tolerances::default(), tol_scale: 1.0, seed: 2024 }
    }
}

impl Options {
    pub fn with_tol_scale(mut self, s: f64) -> Self {
        self.tol = Tolerances::default().scaled(s);
        self.tol_scale = s;
        self
    }

    fn n(&self, default: usize) -> usize {
        self.nodes.unwrap_or(default)
    }
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Five random diagonalizable 4×4 matrices with spectra in Re λ ∈ [-2, -0.2], |Im λ| ≤ 1.
pub fn matrix_substrates(seed: u64) -> Result<Vec<Matrix>> {
    (0..5).map(|k| Matrix::random_stable(seed.wrapping_add(k), 4, (-2.0, -0.2), 1.0)).collect()
}

/// Five bumps with supports in (0, 2].
pub fn probe_bumps() -> Result<Vec<TestFunction>> {
    [(0.1, 1.1), (0.2, 1.7), (0.3, 0.9), (0.5, 2.0), (0.15, 1.4)].iter().map(|&(a, b)| TestFunction::bump(a, b)).collect()
}

fn probe_state() -> Vec<C> {
    vec![c(1.0, 0.0), c(1.0, 1.0), c(-0.5, 0.0), c(0.0, 2.0)]
}

fn gevrey2() -> Result<WeightSequence> {
    WeightSequence::gevrey(2.0, 256)
}

fn ultralog(w: &WeightSequence, opts: &Options) -> Result<Contour> {
    Contour::ultralog(1.0, 0.5, 1.0, w, 400.0, opts.n(4000))
}

/// 𝒢(φ)x over a vertical line against ∫φ(t)e^{tA}x dt.
pub fn matrix_oracle(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("matrix_oracle");
    let line = Contour::vertical_line(1.0, 4000.0, opts.n(24000))?;
    let x = probe_state();
    let bumps = probe_bumps()?;
    for m in matrix_substrates(opts.seed)? {
        let sa = SemigroupAction::distribution(Arc::new(m.clone()), line.clone());
        s.reports.push(verify::check_matrix_oracle(&sa, &m, &bumps, &x, opts.tol.matrix_oracle)?);
    }
    Ok(s)
}

/// 𝒢_α(φ)x for α ∈ {0, ½, 1, 2}: largest pairwise relative difference.
pub fn galpha_independence(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("galpha_independence");
    let alphas = [0.0, 0.5, 1.0, 2.0];
    let mats = matrix_substrates(opts.seed)?;
    let x = probe_state();
    let mut residuals = Vec::new();
    let mut rows = Vec::new();
    for (i, phi) in probe_bumps()?.iter().enumerate() {
        let rules: Vec<GalphaRule> = alphas.iter().map(|&a| GalphaRule::new(a, phi)).collect::<Result<_>>()?;
        for (j, m) in mats.iter().enumerate() {
            let vals: Vec<Vec<C>> = rules.iter().map(|r| r.apply(m, &x)).collect::<Result<_>>()?;
            let mut worst = 0.0f64;
            for a in 0..vals.len() {
                for b in a + 1..vals.len() {
                    worst = worst.max(relative_residual(&vals[a], &vals[b], 0..x.len()));
                }
            }
            residuals.push(worst);
            rows.push(vec![i as f64, j as f64, worst]);
        }
    }
    s.reports.push(CheckReport::new("galpha_independence", &format!("{}|{alphas:?}", opts.seed), residuals, 1e-5 * opts.tol_scale));
    s.tables.insert("galpha".into(), Table { columns: vec!["bump".into(), "matrix".into(), "max_pairwise".into()], rows });
    Ok(s)
}

/// W^{1/2}W^{1/2}φ = -φ' and W^α e^{-t} = e^{-t}.
pub fn weyl_calculus(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("weyl_calculus");
    let phi = TestFunction::bump(0.0, 1.0)?;
    let ts: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    let mut rows = Vec::new();
    for &t in &ts {
        let v = weyl_compose(&phi, 0.5, 0.5, 0.0, t)?;
        let e = -phi.eval_derivative(t, 1)?;
        diff = diff.max((v - e).abs());
        scale = scale.max(e.abs());
        rows.push(vec![t, v, e]);
    }
    let scale_tol = opts.tol_scale;
    s.reports.push(CheckReport::new("weyl_half_half", "bump(0,1)", vec![diff / scale], 1e-5 * scale_tol));
    s.tables.insert("weyl_half_half".into(), Table { columns: vec!["t".into(), "composed".into(), "minus_derivative".into()], rows });
    let mut res = Vec::new();
    for a in [0.25, 0.5, 0.75] {
        for t in [0.0, 0.5, 1.0, 2.0] {
            let v = weyl_derivative(&ExpDecay, a, t)?;
            res.push((v - (-t).exp()).abs() / (-t).exp());
        }
    }
    s.reports.push(CheckReport::new("weyl_exponential", "exp(-t)", res, 1e-8 * scale_tol));
    Ok(s)
}

/// |ω(s)| ≥ e^{M(s)} strictly on 100 log-spaced s ∈ [1e-2, 1e4].
pub fn mollifier_bound() -> Result<Scenario> {
    let mut s = Scenario::new("mollifier_bound");
    for g in [2.0, 3.0] {
        let w = WeightSequence::gevrey(g, 256)?;
        let prod = w.canonical_product(DEFAULT_P_TRUNC)?;
        let mut res = Vec::new();
        let mut rows = Vec::new();
        for k in 0..100 {
            let x = 1e-2 * 1e6f64.powf(k as f64 / 99.0);
            let ln_omega = prod.ln_eval(c(x, 0.0)).re;
            let m = w.associated(x)?;
            // residual 0 when the inequality is strict, 1 otherwise
            res.push(if ln_omega > m { 0.0 } else { 1.0 });
            rows.push(vec![x, ln_omega, m]);
        }
        s.reports.push(CheckReport::new(format!("mollifier_bound_gevrey{g}"), &format!("{g}"), res, 0.0));
        s.tables.insert(format!("gevrey{g}"), Table { columns: vec!["s".into(), "ln_abs_omega".into(), "M".into()], rows });
    }
    Ok(s)
}

/// ∮ e^{λt}/ω(iλ)^4 dλ ≈ 0 on the ultra-logarithmic contour.
pub fn mollifier_vanishing(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("mollifier_vanishing");
    let w = gevrey2()?;
    let g = ultralog(&w, opts)?;
    s.reports.push(verify::check_mollifier_vanishing(&w, &g, DEFAULT_N_TOT, &[0.0, 0.5, 1.0, 2.0], opts.tol.mollifier)?);
    Ok(s)
}

/// C_τ, the semigroup law, the integral identity, derivatives and the Gevrey table.
pub fn semigroup_battery(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("semigroup_battery");
    let w = gevrey2()?;
    let g = ultralog(&w, opts)?;
    let x = probe_state();
    let tol = &opts.tol;
    let grid = [0.1, 0.5, 1.0];
    let pairs: Vec<(C, C)> = grid.iter().flat_map(|&t| grid.iter().map(move |&u| (c(t, 0.0), c(u, 0.0)))).collect();
    let prod = w.canonical_product(DEFAULT_P_TRUNC)?;
    for (k, m) in matrix_substrates(opts.seed)?.into_iter().take(3).enumerate() {
        let sa = SemigroupAction::pointwise(Arc::new(m.clone()), g.clone(), &w, DEFAULT_N_TOT)?;
        let tag = |r: CheckReport| CheckReport { name: format!("{}[{k}]", r.name), ..r };
        s.reports.push(tag(verify::check_regularizer(&sa, tol.regularizer)?));
        s.reports.push(tag(verify::check_semigroup_law(&sa, &pairs, &x, tol.semigroup_law)?));
        s.reports.push(tag(verify::check_integral_identity(&sa, &[0.5, 1.0, 2.0], &x, tol.integral_identity)?));
        s.reports.push(tag(verify::check_derivative_fd(&sa, &[0.25, 0.5, 1.0], &x, tol.derivative_fd)?));
        let times: Vec<f64> = (0..=8).map(|j| j as f64 / 8.0).collect();
        let (rep, table) = verify::gevrey_derivative_table(&sa, &w, 1.0, &times, 10, &x, tol.gevrey_table)?;
        s.reports.push(tag(rep));
        if k == 0 {
            let mut rows = Vec::new();
            for (p, row) in table.rows.iter().enumerate() {
                for (t, v) in table.times.iter().zip(row) {
                    rows.push(vec![p as f64, *t, *v]);
                }
            }
            s.tables.insert("gevrey_table".into(), Table { columns: vec!["p".into(), "t".into(), "scaled_norm".into()], rows });
        }
        // S(t) = e^{tA} ∏(1 - A/m_p)^{-n} from the eigendecomposition
        let e = m.eigen()?;
        let ts = [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)];
        let states = sa.mollified_semigroup(&ts, &x)?;
        let y = &e.inverse * DVector::from_column_slice(&x);
        let res: Vec<f64> = ts
            .iter()
            .zip(&states)
            .map(|(t, st)| {
                let d = DVector::from_iterator(4, e.values.iter().zip(y.iter()).map(|(&mu, yi)| (mu * t).exp() * prod.mollifier(mu, DEFAULT_N_TOT) * yi));
                let o = &e.vectors * d;
                relative_residual(st, o.as_slice(), 0..4)
            })
            .collect();
        s.reports.push(CheckReport::new(format!("eigen_oracle[{k}]"), "", res, tol.semigroup_law));
    }
    Ok(s)
}

/// Least-squares κ with gd ≈ κ·closed, and the residual of that fit.
fn fit_kappa(gd: &[C], closed: &[C]) -> (C, f64) {
    let num: C = closed.iter().zip(gd).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = closed.iter().map(|a| a.norm_sqr()).sum();
    let k = num / den;
    let fitted: Vec<C> = closed.iter().map(|a| a * k).collect();
    (k, relative_residual(gd, &fitted, 0..gd.len()))
}

/// Multiplication by x + ie^x over the gevrey_power contour against the closed form.
pub fn ex32(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("ex32");
    let grid = Grid::uniform(97, 12.0)?;
    let op = Arc::new(Multiplication::new(grid.clone())?);
    let contour = Contour::gevrey_power(1.0, 2.0, 3.0, 4000.0, opts.n(24000))?;
    let sa = SemigroupAction::distribution(op.clone(), contour);
    let f = grid.sample(|x| 1.0 / (1.0 + 0.25 * x * x));
    let bumps = [(0.1, 0.9), (0.2, 1.0), (0.15, 0.6), (0.3, 1.2), (0.05, 0.8)];
    let mut kappas = Vec::new();
    let mut fits = Vec::new();
    let mut rows: Vec<Vec<f64>> = grid.points().iter().map(|x| vec![*x]).collect();
    for &(a, b) in &bumps {
        let phi = TestFunction::bump(a, b)?;
        let gd = sa.gd_action(&phi, &f)?.value;
        let closed = closed_form_mult(&op, &phi, &f)?;
        let (k, r) = fit_kappa(&gd, &closed);
        kappas.push(k);
        fits.push(r);
        for (row, (g, cl)) in rows.iter_mut().zip(gd.iter().zip(&closed)) {
            row.extend([g.re, g.im, cl.re, cl.im]);
        }
    }
    let mean = kappas.iter().sum::<C>() / kappas.len() as f64;
    let spread = kappas.iter().map(|k| (k - mean).norm()).fold(0.0, f64::max) * 2.0 / mean.norm();
    let tol = 1e-6 * opts.tol_scale;
    s.reports.push(
        CheckReport::new("kappa_spread", "ex32", vec![spread], tol)
            .note(format!("kappa={:.12} {:+.3e}i", mean.re, mean.im))
            .note(format!("kappa/(2pi)={:.12}", mean.re / (2.0 * PI)))
            .note("the 1/(2πi) contour normalization reproduces φ̂(x+ie^x)f(x), i.e. 2π times the (2π)^{-1} closed form"),
    );
    s.reports.push(CheckReport::new("closed_form_fit", "ex32", fits, tol));
    s.summary.insert("kappa_re".into(), mean.re);
    s.summary.insert("kappa_im".into(), mean.im);
    s.summary.insert("kappa_over_2pi".into(), mean.re / (2.0 * PI));
    s.summary.insert("spread".into(), spread);
    let mut columns = vec!["x".to_string()];
    for k in 0..bumps.len() {
        columns.extend([format!("gd_re_{k}"), format!("gd_im_{k}"), format!("closed_re_{k}"), format!("closed_im_{k}")]);
    }
    s.tables.insert("closed_form".into(), Table { columns, rows });
    Ok(s)
}

/// A = -d/ds on the half-line: resolvent consistency, generator identity, kernel probe.
pub fn ex33(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("ex33");
    let w = gevrey2()?;
    let grid = Grid::uniform(801, 8.0)?;
    let op = Arc::new(LeftDerivative::new(grid.clone(), w.clone(), 1.0)?);
    let probes: Vec<Vec<C>> = [(0.5, 4.0), (1.0, 5.0), (2.0, 6.5)]
        .iter()
        .map(|&(a, b)| TestFunction::bump(a, b).map(|f| grid.sample(|x| f.eval(x))))
        .collect::<Result<_>>()?;
    let range = op.interior();
    let mut res = Vec::new();
    for l in [c(4.0, 0.0), c(2.0, 1.0), c(1.0, -3.0), c(0.5, 10.0)] {
        for f in &probes {
            let u = op.resolvent(l, f)?;
            let au = op.apply(&u)?;
            let lhs: Vec<C> = u.iter().zip(&au).map(|(u, a)| u * l - a).collect();
            res.push(relative_residual(&lhs, f, range.clone()));
        }
    }
    s.reports.push(CheckReport::new("resolvent_consistency", "ex33", res, 1e-6 * opts.tol_scale));
    let sa = SemigroupAction::distribution(op.clone(), Contour::vertical_line(1.0, 3000.0, opts.n(16000))?);
    let mut gen = Vec::new();
    for &(a, b) in &[(0.2, 1.7), (0.3, 2.3), (0.5, 2.5)] {
        let phi = TestFunction::bump(a, b)?;
        for f in &probes {
            gen.push(verify::check_generator_identity(&sa, &phi, f, opts.tol.generator)?.worst());
        }
    }
    s.reports.push(CheckReport::new("generator_identity", "ex33", gen, opts.tol.generator));
    // a coarser grid keeps the stacked SVD small
    let coarse = Grid::uniform(49, 6.0)?;
    let cop = Arc::new(LeftDerivative::new(coarse, w, 1.0)?);
    let csa = SemigroupAction::distribution(cop, Contour::vertical_line(1.0, 2000.0, opts.n(8000))?);
    let phis: Vec<TestFunction> = (0..8).map(|k| TestFunction::bump(0.05 + 0.1 * k as f64, 0.6 + 0.25 * k as f64)).collect::<Result<_>>()?;
    let kp = verify::kernel_probe(&csa, &phis, opts.tol.kernel)?;
    s.reports.push(kp);
    Ok(s)
}

/// Robin Laplacian: kernel representation against the contour action, boundary
/// residuals, and semigroup identities at complex times.
pub fn ex35(opts: &Options) -> Result<Scenario> {
    let mut s = Scenario::new("ex35");
    let grid = Grid::uniform(1501, 30.0)?;
    let op = Arc::new(RobinLaplacian::new(grid.clone(), 1.0, 1.0, 1.0, 0.0)?);
    let fs = TestFunction::bump(1.0, 6.0)?;
    let f = grid.sample(|x| fs.eval(x));
    let n_line = opts.n(16000);
    let sa = SemigroupAction::distribution(op.clone(), Contour::vertical_line(1.0, 3000.0, n_line)?);
    let mut two = Vec::new();
    let mut rows: Vec<Vec<f64>> = grid.points().iter().map(|x| vec![*x]).collect();
    for &(a, b) in &[(0.2, 1.2), (0.5, 1.5)] {
        let phi = TestFunction::bump(a, b)?;
        let gd = sa.gd_action(&phi, &f)?.value;
        let kern = closed_form_robin_kernel(&op, &phi, &f, 1.0, 3000.0, n_line)?;
        two.push(relative_residual(&gd, &kern, 0..gd.len()));
        for (row, (g, k)) in rows.iter_mut().zip(gd.iter().zip(&kern)) {
            row.extend([g.re, k.re]);
        }
    }
    s.reports.push(CheckReport::new("two_path", "ex35", two, 1e-4 * opts.tol_scale));
    s.tables.insert("two_path".into(), Table { columns: ["x", "gd_0", "kernel_0", "gd_1", "kernel_1"].map(String::from).to_vec(), rows });

    let mut bres = Vec::new();
    for l in [c(1.0, 0.0), c(2.0, 5.0), c(-1.0, 3.0), c(0.5, -20.0)] {
        let u = op.resolvent(l, &f)?;
        bres.push(op.robin_residual(&u) / sup_norm(&u));
    }
    s.reports.push(CheckReport::new("robin_boundary", "ex35", bres, 1e-5 * opts.tol_scale));

    let w = gevrey2()?;
    let sector = Contour::sector(0.5, PI / 4.0, 200.0, opts.n(4000))?;
    let sp = SemigroupAction::pointwise(op.clone(), sector, &w, DEFAULT_N_TOT)?;
    let x = grid.sample(|x| TestFunction::bump(2.0, 7.0).map(|b| b.eval(x)).unwrap_or(0.0));
    let tol = 1e-4 * opts.tol_scale;
    let psi = PI / 4.0 - 0.1;
    let ts: Vec<C> = [psi, -psi].iter().map(|p| C::from_polar(0.5, *p)).collect();
    let pairs: Vec<(C, C)> = ts.iter().map(|t| (*t, *t)).collect();
    let law = verify::check_semigroup_law(&sp, &pairs, &x, tol)?;
    s.reports.push(CheckReport { name: "complex_time_law".into(), ..law });
    let d = sp.semigroup_derivative(1, &ts, &x)?;
    let st = sp.mollified_semigroup(&ts, &x)?;
    let range = op.interior();
    let gres: Vec<f64> = st
        .iter()
        .zip(&d)
        .map(|(u, du)| op.apply(u).map(|au| relative_residual(&au, du, range.clone())))
        .collect::<Result<_>>()?;
    s.reports.push(CheckReport::new("complex_time_generator", "ex35", gres, tol));
    Ok(s)
}

pub fn negative_controls(opts: &Options) -> Result<Vec<ControlOutcome>> {
    verify::negative_controls(&opts.tol)
}

/// Dense C_τ for a matrix from the product ∏(I - A/m_p)^{-n}.
pub fn regularizer_oracle(m: &Matrix, w: &WeightSequence, n: u32) -> Result<DMatrix<C>> {
    let e = m.eigen()?;
    let prod = w.canonical_product(DEFAULT_P_TRUNC.min(w.p_max()))?;
    let d = DVector::from_iterator(e.values.len(), e.values.iter().map(|&mu| prod.mollifier(mu, n)));
    Ok(&e.vectors * DMatrix::from_diagonal(&d) * &e.inverse)
}
