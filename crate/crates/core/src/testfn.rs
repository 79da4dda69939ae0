//! Compactly supported test functions: derivatives, the transform
//! φ̂(λ) = ∫ e^{λt} φ(t) dt, Weyl derivatives, the convolution *₀ and ultranorms.

use crate::cheb::ChebSeries;
use crate::error::{invalid, Error, Result};
use crate::quad::{gl16, singular_left};
use crate::weights::WeightSequence;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

type C = Complex64;

/// Degree of the Chebyshev representation.
pub const DEGREE: usize = 256;
/// Highest derivative order served (accuracy guard D/4).
pub const MAX_DERIVATIVE: usize = DEGREE / 4;

const MIN_LEVEL: u32 = 6;
const MAX_LEVEL: u32 = 20;

#[derive(Debug, Clone)]
enum Repr {
    /// scale · d^order/dt^order of the standard bump on the support.
    Bump { order: usize, scale: f64 },
    /// Chebyshev interpolant with its derivative series cached lazily.
    Cheb { series: Arc<Vec<OnceLock<ChebSeries>>>, base: ChebSeries },
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    t0: f64,
    t1: f64,
    repr: Repr,
    gevrey_order: Option<f64>,
    samples: Arc<Vec<OnceLock<Vec<f64>>>>,
}

/// JSON form: the Chebyshev coefficients of the degree-D interpolant on the support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionJson {
    pub support: [f64; 2],
    pub degree: usize,
    pub chebyshev_coefficients: Vec<f64>,
}

fn new_cache() -> Arc<Vec<OnceLock<Vec<f64>>>> {
    Arc::new((0..=MAX_LEVEL).map(|_| OnceLock::new()).collect())
}

/// b^{(k)}(u), k = 0..=n, for b(u) = exp(-1/(1-u²)).
///
/// With q = 1/(1-u²), b^{(k)} = P_k(u) q^{2k} e^{-q} where the scaled
/// polynomials obey P_{m+1} = Σ_j C(m,j) g_{j+1} P_{m-j} q^{-j} and
/// g_k = g^{(k)}/q^{k+1} = -k!/2 [(1+u)^{k+1} + (-1)^k (1-u)^{k+1}].
pub fn bump_derivatives(u: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if u.abs() >= 1.0 {
        return out;
    }
    let q = 1.0 / ((1.0 - u) * (1.0 + u));
    let mut g = vec![0.0; n + 2];
    let mut fact = 1.0;
    let (mut pp, mut pm) = (1.0 + u, 1.0 - u);
    for (k, gk) in g.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *gk = -0.5 * fact * (pp + sign * pm);
        pp *= 1.0 + u;
        pm *= 1.0 - u;
    }
    let qinv = 1.0 / q;
    let mut p = vec![1.0];
    let mut row = vec![1.0];
    for m in 0..n {
        let mut s = 0.0;
        let mut qp = 1.0;
        for j in 0..=m {
            s += row[j] * g[j + 1] * p[m - j] * qp;
            qp *= qinv;
        }
        p.push(s);
        let mut next = vec![1.0; m + 2];
        for j in 1..=m {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    let lq = q.ln();
    for (k, o) in out.iter_mut().enumerate() {
        *o = p[k] * (-q + 2.0 * k as f64 * lq).exp();
    }
    out
}

impl TestFunction {
    /// Standard bump exp(-1/(1-u²)) rescaled to [t0, t1]; Gevrey order 2.
    pub fn bump(t0: f64, t1: f64) -> Result<Self> {
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return invalid(format!("bump support [{t0}, {t1}] must satisfy t0 < t1"));
        }
        Ok(Self {
            t0,
            t1,
            repr: Repr::Bump { order: 0, scale: 1.0 },
            gevrey_order: Some(2.0),
            samples: new_cache(),
        })
    }

    pub fn from_chebyshev(series: ChebSeries) -> Result<Self> {
        if !(series.a < series.b) || series.coeffs.is_empty() {
            return invalid("Chebyshev test function needs a nonempty interval and coefficients");
        }
        Ok(Self {
            t0: series.a,
            t1: series.b,
            repr: Repr::Cheb {
                series: Arc::new((0..=MAX_DERIVATIVE).map(|_| OnceLock::new()).collect()),
                base: series,
            },
            gevrey_order: None,
            samples: new_cache(),
        })
    }

    pub fn from_json(j: &TestFunctionJson) -> Result<Self> {
        if j.chebyshev_coefficients.len() != j.degree + 1 {
            return invalid("chebyshev_coefficients length must equal degree + 1");
        }
        Self::from_chebyshev(ChebSeries {
            a: j.support[0],
            b: j.support[1],
            coeffs: j.chebyshev_coefficients.clone(),
        })
    }

    pub fn to_json(&self) -> TestFunctionJson {
        let s = self.chebyshev(DEGREE);
        TestFunctionJson { support: [s.a, s.b], degree: s.degree(), chebyshev_coefficients: s.coeffs }
    }

    /// Chebyshev interpolant of the given degree on the support.
    pub fn chebyshev(&self, degree: usize) -> ChebSeries {
        match &self.repr {
            Repr::Cheb { base, .. } if base.degree() == degree => base.clone(),
            _ => ChebSeries::from_fn(self.t0, self.t1, degree, |t| self.eval(t)),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn gevrey_order(&self) -> Option<f64> {
        self.gevrey_order
    }

    /// True for the 𝒟₀ class (support in [0, ∞)).
    pub fn in_d0(&self) -> bool {
        self.t0 >= 0.0
    }

    fn cheb_derivative(&self, k: usize) -> &ChebSeries {
        match &self.repr {
            Repr::Cheb { series, base } => {
                if k == 0 {
                    return base;
                }
                series[k].get_or_init(|| self.cheb_derivative(k - 1).derivative())
            }
            Repr::Bump { .. } => unreachable!(),
        }
    }

    /// Derivatives φ^{(0..=n)}(t) without the accuracy guard.
    fn derivs(&self, t: f64, n: usize) -> Vec<f64> {
        if t <= self.t0 || t >= self.t1 {
            return vec![0.0; n + 1];
        }
        match &self.repr {
            Repr::Bump { order, scale } => {
                let w = self.t1 - self.t0;
                let u = (2.0 * t - self.t0 - self.t1) / w;
                let b = bump_derivatives(u, n + order);
                let s = 2.0 / w;
                (0..=n).map(|k| scale * s.powi((k + order) as i32) * b[k + order]).collect()
            }
            Repr::Cheb { .. } => (0..=n).map(|k| self.cheb_derivative(k).eval(t)).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivs(t, 0)[0]
    }

    /// k-th derivative at t.
    pub fn eval_derivative(&self, t: f64, k: usize) -> Result<f64> {
        self.guard(k)?;
        Ok(self.derivs(t, k)[k])
    }

    fn guard(&self, k: usize) -> Result<()> {
        let base = match self.repr {
            Repr::Bump { order, .. } => order,
            Repr::Cheb { .. } => 0,
        };
        if k + base > MAX_DERIVATIVE {
            return Err(Error::AccuracyGuard(format!(
                "derivative order {} exceeds D/4 = {MAX_DERIVATIVE}",
                k + base
            )));
        }
        Ok(())
    }

    pub fn derivative(&self, k: usize) -> Result<Self> {
        self.guard(k)?;
        if k == 0 {
            return Ok(self.clone());
        }
        let repr = match &self.repr {
            Repr::Bump { order, scale } => Repr::Bump { order: order + k, scale: *scale },
            Repr::Cheb { .. } => {
                return Self::from_chebyshev(self.cheb_derivative(k).clone()).map(|mut f| {
                    f.gevrey_order = self.gevrey_order;
                    f
                })
            }
        };
        Ok(Self { t0: self.t0, t1: self.t1, repr, gevrey_order: self.gevrey_order, samples: new_cache() })
    }

    pub fn scaled(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Repr::Bump { order, scale } => Repr::Bump { order: *order, scale: scale * c },
            Repr::Cheb { base, .. } => {
                return Self::from_chebyshev(ChebSeries {
                    a: base.a,
                    b: base.b,
                    coeffs: base.coeffs.iter().map(|x| x * c).collect(),
                })
                .map(|mut f| {
                    f.gevrey_order = self.gevrey_order;
                    f
                })
                .expect("valid series stays valid under scaling")
            }
        };
        Self { t0: self.t0, t1: self.t1, repr, gevrey_order: self.gevrey_order, samples: new_cache() }
    }

    /// Translate τ_c φ(t) = φ(t - c).
    pub fn translate(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Repr::Bump { .. } => self.repr.clone(),
            Repr::Cheb { base, .. } => {
                return Self::from_chebyshev(base.shifted(c))
                    .map(|mut f| {
                        f.gevrey_order = self.gevrey_order;
                        f
                    })
                    .expect("shifted series stays valid")
            }
        };
        Self {
            t0: self.t0 + c,
            t1: self.t1 + c,
            repr,
            gevrey_order: self.gevrey_order,
            samples: new_cache(),
        }
    }

    /// ∫φ by Clenshaw–Curtis on the degree-D interpolant.
    pub fn integral(&self) -> f64 {
        match &self.repr {
            Repr::Cheb { base, .. } => base.integral(),
            Repr::Bump { .. } => self.chebyshev(DEGREE).integral(),
        }
    }

    /// ∫φ by the trapezoid rule with `k` intervals.
    pub fn integral_trapezoid(&self, k: usize) -> f64 {
        let h = (self.t1 - self.t0) / k as f64;
        h * (1..k).map(|j| self.eval(self.t0 + j as f64 * h)).sum::<f64>()
    }

    fn samples(&self, level: u32) -> &[f64] {
        self.samples[level as usize].get_or_init(|| {
            let k = 1usize << level;
            let h = (self.t1 - self.t0) / k as f64;
            (1..k).map(|j| self.eval(self.t0 + j as f64 * h)).collect()
        })
    }

    /// φ̂(λ) = ∫ e^{λt} φ(t) dt.
    ///
    /// The integrand is flat at both ends of the support, so the trapezoid
    /// rule converges at the rate of the aliased transform; the sample count
    /// is chosen so that the nearest alias is far down the transform's decay.
    pub fn laplace_hat(&self, lambda: C) -> C {
        let width = self.t1 - self.t0;
        let half = 0.5 * width;
        let y_alias = (40.0 + lambda.re.abs() * width).powi(2) / half;
        let k_need = width * (lambda.im.abs() + y_alias) / (2.0 * PI);
        let level = (k_need.max(1.0).log2().ceil() as u32).clamp(MIN_LEVEL, MAX_LEVEL);
        let samples = self.samples(level);
        let k = 1usize << level;
        let h = width / k as f64;
        let step = (lambda * h).exp();
        let mut acc = C::new(0.0, 0.0);
        let mut j = 1usize;
        for chunk in samples.chunks(64) {
            let mut e = (lambda * (self.t0 + j as f64 * h)).exp();
            let mut part = C::new(0.0, 0.0);
            for &v in chunk {
                part += e * v;
                e *= step;
            }
            acc += part;
            j += chunk.len();
        }
        acc * h
    }

    /// W₊^α φ(t).
    pub fn weyl(&self, alpha: f64, t: f64) -> Result<f64> {
        weyl_derivative(self, alpha, t)
    }

    /// (φ *₀ ψ)(t) = ∫_0^t φ(t-s) ψ(s) ds, represented at degree 2D.
    pub fn convolve0(&self, other: &TestFunction) -> Result<TestFunction> {
        if self.t0 < 0.0 || other.t0 < 0.0 {
            return invalid("convolve0 needs supports in [0, ∞)");
        }
        let (a, b) = (self.t0 + other.t0, self.t1 + other.t1);
        let m = 400usize;
        let conv = |t: f64| {
            let lo = other.t0.max(t - self.t1);
            let hi = other.t1.min(t - self.t0);
            if hi <= lo {
                return 0.0;
            }
            let h = (hi - lo) / m as f64;
            h * (1..m)
                .map(|j| {
                    let s = lo + j as f64 * h;
                    self.eval(t - s) * other.eval(s)
                })
                .sum::<f64>()
        };
        let series = ChebSeries::from_fn(a, b, 2 * DEGREE, conv);
        let mut f = TestFunction::from_chebyshev(series)?;
        f.gevrey_order = match (self.gevrey_order, other.gevrey_order) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        Ok(f)
    }

    /// sup_p h^p sup_t |φ^{(p)}(t)| / M_p for each p ≤ p_max.
    pub fn ultranorm_profile(&self, w: &WeightSequence, h: f64, p_max: usize) -> Result<Vec<f64>> {
        self.guard(p_max)?;
        if p_max > w.p_max() {
            return invalid("p_max exceeds the weight sequence truncation");
        }
        let n = 4000;
        let mut sup = vec![0.0f64; p_max + 1];
        for j in 1..n {
            let t = self.t0 + (self.t1 - self.t0) * j as f64 / n as f64;
            let d = self.derivs(t, p_max);
            for (s, v) in sup.iter_mut().zip(d) {
                *s = s.max(v.abs());
            }
        }
        Ok(sup
            .iter()
            .enumerate()
            .map(|(p, s)| (p as f64 * h.ln() - w.ln_m(p)).exp() * s)
            .collect())
    }

    /// ‖φ‖_{M_p,h} = sup over the support and p ≤ p_max of h^p |φ^{(p)}| / M_p.
    pub fn ultranorm(&self, w: &WeightSequence, h: f64, p_max: usize) -> Result<f64> {
        if !(h > 0.0) {
            return invalid("ultranorm needs h > 0");
        }
        Ok(self.ultranorm_profile(w, h, p_max)?.into_iter().fold(0.0, f64::max))
    }
}

/// A function for which the Weyl integral can be formed.
pub trait WeylSource {
    /// n-th derivative at t.
    fn derivative_at(&self, t: f64, n: usize) -> f64;
    /// Start of the support (may be -∞).
    fn start(&self) -> f64;
    /// Right end of the integration range for the integral starting at t.
    fn horizon(&self, t: f64) -> f64;
    /// Length scale on which the function varies.
    fn feature_scale(&self) -> f64;
}

impl WeylSource for TestFunction {
    fn derivative_at(&self, t: f64, n: usize) -> f64 {
        self.derivs(t, n)[n]
    }
    fn start(&self) -> f64 {
        self.t0
    }
    fn horizon(&self, _t: f64) -> f64 {
        self.t1
    }
    fn feature_scale(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// e^{-t} on all of ℝ, used to validate the Weyl quadrature (W₊^α e^{-t} = e^{-t}).
#[derive(Debug, Clone, Copy)]
pub struct ExpDecay;

impl WeylSource for ExpDecay {
    fn derivative_at(&self, t: f64, n: usize) -> f64 {
        if n % 2 == 0 {
            (-t).exp()
        } else {
            -(-t).exp()
        }
    }
    fn start(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn horizon(&self, t: f64) -> f64 {
        t + 50.0
    }
    fn feature_scale(&self) -> f64 {
        1.0
    }
}

/// A Chebyshev series on [a, b], identically zero right of b.
#[derive(Debug, Clone)]
pub struct ChebWindow {
    derivs: Vec<ChebSeries>,
}

impl ChebWindow {
    pub fn new(series: ChebSeries, max_order: usize) -> Self {
        let mut derivs = vec![series];
        for k in 0..max_order {
            let d = derivs[k].derivative();
            derivs.push(d);
        }
        Self { derivs }
    }
}

impl WeylSource for ChebWindow {
    fn derivative_at(&self, t: f64, n: usize) -> f64 {
        let s = &self.derivs[n];
        if t < s.a || t > s.b {
            0.0
        } else {
            s.eval(t)
        }
    }
    fn start(&self) -> f64 {
        self.derivs[0].a
    }
    fn horizon(&self, _t: f64) -> f64 {
        self.derivs[0].b
    }
    fn feature_scale(&self) -> f64 {
        self.derivs[0].b - self.derivs[0].a
    }
}

/// W₊^α f(t) = ((-1)^n / Γ(n-α)) ∫_0^∞ u^{n-α-1} f^{(n)}(t+u) du, n = ⌈α⌉,
/// with W₊^n = (-1)^n dⁿ/dtⁿ for integer α.
pub fn weyl_derivative<F: WeylSource + ?Sized>(f: &F, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return invalid(format!("Weyl order α = {alpha} must be nonnegative"));
    }
    let n = alpha.ceil() as usize;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    if (alpha - alpha.round()).abs() < 1e-14 {
        let n = alpha.round() as usize;
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(s * f.derivative_at(t, n));
    }
    let gam = n as f64 - alpha - 1.0;
    let len = f.horizon(t) - t;
    if len <= 0.0 {
        return Ok(0.0);
    }
    let h = f.feature_scale() / 32.0;
    let u_start = (f.start() - t).max(0.0);
    let g = |u: f64| f.derivative_at(t + u, n);
    let mut acc = 0.0;
    let mut from = u_start;
    if u_start <= h {
        let first = h.min(len);
        for (u, w) in singular_left(24, gam, first) {
            acc += w * g(u);
        }
        from = first;
    }
    if len > from {
        let panels = ((len - from) / h).ceil().max(1.0) as usize;
        let ph = (len - from) / panels as f64;
        let rule = gl16();
        for k in 0..panels {
            let a = from + k as f64 * ph;
            for (u, w) in rule.on(a, a + ph) {
                acc += w * u.powf(gam) * g(u);
            }
        }
    }
    Ok(sign * acc / gamma(n as f64 - alpha))
}

/// W₊^α(W₊^β φ)(t): W₊^β φ is represented on [a, t1] by a Chebyshev series of
/// degree D and the outer derivative is applied to that representation.
pub fn weyl_compose(phi: &TestFunction, alpha: f64, beta: f64, window_start: f64, t: f64) -> Result<f64> {
    let (_, t1) = phi.support();
    if !(window_start < t1) || t < window_start {
        return invalid("composition window must contain t and end at the support end");
    }
    let err = std::cell::RefCell::new(None);
    let inner = ChebSeries::from_fn(window_start, t1, DEGREE, |s| match weyl_derivative(phi, beta, s) {
        Ok(v) => v,
        Err(e) => {
            *err.borrow_mut() = Some(e);
            0.0
        }
    });
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let window = ChebWindow::new(inner, alpha.ceil() as usize);
    weyl_derivative(&window, alpha, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b01() -> TestFunction {
        TestFunction::bump(0.0, 1.0).unwrap()
    }

    #[test]
    fn bump_values() {
        let f = b01();
        assert!((f.eval(0.5) - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert!(f.eval(0.999) > 0.0);
        // ½ ∫_{-1}^{1} e^{-1/(1-u²)} du, the integral being 0.443993816168079...
        assert!((f.integral() - 0.443_993_816_168_079 / 2.0).abs() < 1e-12);
        assert!((f.integral() - f.integral_trapezoid(2560)).abs() < 1e-9);
        assert!(TestFunction::bump(1.0, 1.0).is_err());
    }

    #[test]
    fn bump_derivatives_match_closed_forms() {
        for &u in &[-0.9, -0.3, 0.0, 0.45, 0.97] {
            let d = bump_derivatives(u, 2);
            let q = 1.0 / (1.0 - u * u);
            let b = (-q).exp();
            assert!((d[0] - b).abs() < 1e-15);
            assert!((d[1] - (-2.0 * u * q * q * b)).abs() < 1e-13 * d[1].abs().max(1e-300));
            // b'' = (g'' + g'^2) b with g' = -2u q², g'' = -2q² - 8u² q³
            let g1 = -2.0 * u * q * q;
            let g2 = -2.0 * q * q - 8.0 * u * u * q * q * q;
            let e = (g2 + g1 * g1) * b;
            assert!((d[2] - e).abs() < 1e-12 * e.abs().max(1e-300), "{u} {} {e}", d[2]);
        }
    }

    #[test]
    fn derivative_sup_table() {
        // sup_t |φ^{(p)}(t)| for bump(0,1): 80-digit differentiation on a 4000-point grid
        let reference = [0.367_879_4, 1.596_859, 30.998_67, 1491.068, 1.330_505e5, 1.908_314e7, 5.214_306e9, 1.860_432e12, 8.450_031e14];
        let w = WeightSequence::gevrey(2.0, 32).unwrap();
        let prof = b01().ultranorm_profile(&w, 1.0, 8).unwrap();
        for (p, r) in reference.iter().enumerate() {
            let sup = prof[p] * w.m(p);
            assert!((sup / r - 1.0).abs() < 1e-3, "{p} {sup} {r}");
        }
    }

    #[test]
    fn derivatives_compose_and_integrate_to_zero() {
        let f = b01();
        let d1 = f.derivative(1).unwrap();
        let d11 = d1.derivative(1).unwrap();
        let d2 = f.derivative(2).unwrap();
        for &t in &[0.1, 0.37, 0.8] {
            assert!((d11.eval(t) - d2.eval(t)).abs() < 1e-8);
        }
        assert!(d1.integral().abs() < 1e-12);
        for j in 1..50 {
            let t = j as f64 / 100.0;
            assert!(d1.eval(t) > 0.0 && d1.eval(1.0 - t) < 0.0);
        }
        assert!(f.derivative(MAX_DERIVATIVE + 1).is_err());
        assert!(matches!(f.eval_derivative(0.5, 65), Err(Error::AccuracyGuard(_))));
    }

    #[test]
    fn derivatives_vanish_at_ends() {
        let f = TestFunction::bump(0.2, 1.4).unwrap();
        let cheb = TestFunction::from_json(&f.to_json()).unwrap();
        let peak = f.eval(0.8);
        for k in 0..=8 {
            for &t in &[0.2, 1.4] {
                assert_eq!(f.eval_derivative(t, k).unwrap(), 0.0);
                let v = cheb.cheb_derivative(0).eval(t);
                assert!(v.abs() <= 1e-9 * peak, "{k} {v}");
            }
        }
    }

    #[test]
    fn transform_basic_identities() {
        let f = TestFunction::bump(0.3, 1.1).unwrap();
        assert!((f.laplace_hat(C::new(0.0, 0.0)).re - f.integral()).abs() < 1e-13);
        let abs_int = f.integral();
        for &l in &[C::new(0.5, 3.0), C::new(2.0, -7.0), C::new(0.0, 40.0)] {
            assert!(f.laplace_hat(l).norm() <= (1.1 * l.re).exp() * abs_int * (1.0 + 1e-12));
        }
        // shift identity
        let g = f.translate(0.7);
        for &l in &[C::new(0.5, 3.0), C::new(-1.0, 12.0)] {
            let lhs = g.laplace_hat(l);
            let rhs = (l * 0.7).exp() * f.laplace_hat(l);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1e-300));
        }
        // against composite Gauss–Legendre
        for &l in &[C::new(1.0, 5.0), C::new(3.0, -60.0), C::new(-2.0, 0.5)] {
            let gl = |part: fn(C) -> f64| {
                crate::quad::composite_gl(0.3, 1.1, 400, |t| part((l * t).exp()) * f.eval(t))
            };
            let expect = C::new(gl(|z| z.re), gl(|z| z.im));
            assert!((f.laplace_hat(l) - expect).norm() < 1e-14, "{l}");
        }
    }

    #[test]
    fn paley_wiener_decay_on_vertical_line() {
        let f = b01();
        let a = f.laplace_hat(C::new(1.0, 200.0)).norm();
        assert!(a < 1e-4 * f.laplace_hat(C::new(1.0, 0.0)).norm(), "{a}");
    }

    #[test]
    fn convolution_properties() {
        let f = TestFunction::bump(0.1, 0.9).unwrap();
        let g = TestFunction::bump(0.0, 0.6).unwrap();
        let fg = f.convolve0(&g).unwrap();
        let gf = g.convolve0(&f).unwrap();
        assert_eq!(fg.support(), (0.1, 1.5));
        for j in 0..=60 {
            let t = 0.1 + 1.4 * j as f64 / 60.0;
            assert!((fg.eval(t) - gf.eval(t)).abs() < 1e-9);
        }
        assert!((fg.integral() - f.integral() * g.integral()).abs() < 1e-12);
        for &l in &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 5.0)] {
            let lhs = fg.laplace_hat(l);
            let rhs = f.laplace_hat(l) * g.laplace_hat(l);
            assert!((lhs - rhs).norm() < 1e-7 * rhs.norm(), "{l} {lhs} {rhs}");
        }
        assert!(TestFunction::bump(-1.0, 0.5).unwrap().convolve0(&g).is_err());
    }

    #[test]
    fn weyl_integer_orders() {
        let f = TestFunction::bump(0.2, 1.2).unwrap();
        for &t in &[0.3, 0.7, 1.0] {
            assert_eq!(f.weyl(0.0, t).unwrap(), f.eval(t));
            assert_eq!(f.weyl(1.0, t).unwrap(), -f.eval_derivative(t, 1).unwrap());
            assert_eq!(f.weyl(2.0, t).unwrap(), f.eval_derivative(t, 2).unwrap());
        }
        assert!(f.weyl(-0.5, 0.5).is_err());
    }

    #[test]
    fn weyl_of_exponential() {
        for &a in &[0.25, 0.5, 0.75, 1.5] {
            for &t in &[-1.0, 0.0, 0.8] {
                let v = weyl_derivative(&ExpDecay, a, t).unwrap();
                assert!((v - (-t as f64).exp()).abs() < 1e-12, "{a} {t} {v}");
            }
        }
    }

    #[test]
    fn weyl_half_twice_is_minus_derivative() {
        let f = TestFunction::bump(0.0, 1.0).unwrap();
        let scale = (1..100).map(|j| f.eval_derivative(j as f64 / 100.0, 1).unwrap().abs()).fold(0.0, f64::max);
        for j in 1..20 {
            let t = j as f64 / 20.0;
            let v = weyl_compose(&f, 0.5, 0.5, 0.0, t).unwrap();
            let e = -f.eval_derivative(t, 1).unwrap();
            assert!((v - e).abs() < 1e-7 * scale, "{t} {v} {e}");
        }
    }

    #[test]
    fn weyl_composition_grid() {
        let f = TestFunction::bump(0.0, 1.0).unwrap();
        let orders = [0.25, 0.5, 1.0];
        for &a in &orders {
            for &b in &orders {
                let ts: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
                let direct: Vec<f64> = ts.iter().map(|&t| f.weyl(a + b, t).unwrap()).collect();
                let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for (&t, d) in ts.iter().zip(&direct) {
                    let v = weyl_compose(&f, a, b, 0.0, t).unwrap();
                    assert!((v - d).abs() <= 1e-5 * scale, "{a} {b} {t} {v} {d}");
                }
            }
        }
    }

    #[test]
    fn ultranorm_properties() {
        let f = b01();
        let w = WeightSequence::gevrey(2.0, 64).unwrap();
        assert!((f.ultranorm(&w, 1.0, 0).unwrap() - (-1f64).exp()).abs() < 1e-6);
        for k in [2, 5, 8] {
            assert!(f.ultranorm(&w, 2.0, k).unwrap() >= f.ultranorm(&w, 1.0, k).unwrap());
        }
        // the norm stops growing with p_max once h is small enough
        let n: Vec<f64> = [4, 6, 8].iter().map(|&k| f.ultranorm(&w, 0.1, k).unwrap()).collect();
        assert!(n.windows(2).all(|x| (x[1] / x[0] - 1.0).abs() <= 0.05), "{n:?}");
        // at h = 1 it keeps growing: the bump is Gevrey 2 in the Roumieu, not Beurling, sense
        let big: Vec<f64> = [4, 6, 8].iter().map(|&k| f.ultranorm(&w, 1.0, k).unwrap()).collect();
        assert!(big[2] > 2.0 * big[0], "{big:?}");
    }

    #[test]
    fn json_round_trip() {
        let f = TestFunction::bump(0.5, 2.0).unwrap();
        let j = f.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = TestFunction::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        for k in 0..=40 {
            let t = 0.5 + 1.5 * k as f64 / 40.0;
            assert!((back.eval(t) - f.eval(t)).abs() < 1e-12);
        }
        let l = C::new(1.0, 8.0);
        assert!((back.laplace_hat(l) - f.laplace_hat(l)).norm() < 1e-11);
        assert!(serde_json::from_str::<TestFunctionJson>(r#"{"support":[0,1],"degree":0,"chebyshev_coefficients":[1],"x":1}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn transform_is_linear(t0 in 0.0f64..1.0, w in 0.3f64..1.5, a in -3.0f64..3.0, re in -2.0f64..3.0, im in -80.0f64..80.0) {
                let f = TestFunction::bump(t0, t0 + w).unwrap();
                let g = f.derivative(1).unwrap();
                let l = C::new(re, im);
                // integration by parts: (φ')^(λ) = -λ φ̂(λ)
                let lhs = g.laplace_hat(l);
                let rhs = -l * f.laplace_hat(l);
                let scale = (re * (t0 + w)).exp().max((re * t0).exp()) * (1.0 + l.norm());
                prop_assert!((lhs - rhs).norm() <= 1e-11 * scale);
                let sc = f.scaled(a);
                prop_assert!((sc.laplace_hat(l) - a * f.laplace_hat(l)).norm() <= 1e-13 * scale);
            }

            #[test]
            fn weyl_semigroup_property(t in 0.05f64..0.9) {
                let f = TestFunction::bump(0.0, 1.0).unwrap();
                let v = weyl_compose(&f, 0.25, 0.75, 0.0, t).unwrap();
                let e = -f.eval_derivative(t, 1).unwrap();
                prop_assert!((v - e).abs() < 1e-6);
            }
        }
    }
}
