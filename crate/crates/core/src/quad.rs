//! Gaussian rules and deterministic summation shared by the other modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;
use std::sync::OnceLock;

/// Nodes and weights of an `n`-point rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Map the rule onto [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomials P_0..=P_kmax at x.
pub fn legendre_values(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax >= 1 {
        out.push(x);
    }
    for k in 2..=kmax {
        let kf = k as f64;
        let v = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(v);
    }
    out
}

pub const PANEL: usize = 16;

pub fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(PANEL))
}

pub fn gl32() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(32))
}

/// Gauss–Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1] (Golub–Welsch).
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let mut j = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        j[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let num = 4.0 * m * (m + a) * (m + b) * (m + ab);
            let den = (2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0);
            let off = (num / den).sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Rule for ∫_0^L u^γ g(u) du with γ > -1: returns (u_i, w_i) such that Σ w_i g(u_i) ≈ the integral.
pub fn singular_left(n: usize, gamma: f64, len: f64) -> Vec<(f64, f64)> {
    let r = gauss_jacobi(n, 0.0, gamma);
    let scale = (len / 2.0).powf(gamma + 1.0);
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&x, &w)| (0.5 * len * (x + 1.0), w * scale))
        .collect()
}

/// Pairwise (cascade) summation of complex values in a fixed order.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise summation of equal-length complex vectors.
pub fn pairwise_sum_vec(xs: &[Vec<Complex64>], dim: usize) -> Vec<Complex64> {
    match xs.len() {
        0 => vec![Complex64::new(0.0, 0.0); dim],
        1 => xs[0].clone(),
        n => {
            let mid = n / 2;
            let mut a = pairwise_sum_vec(&xs[..mid], dim);
            let b = pairwise_sum_vec(&xs[mid..], dim);
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        }
    }
}

/// Composite 16-point Gauss–Legendre on [a, b] with `panels` equal panels.
pub fn composite_gl(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| gl16().integrate(a + k as f64 * h, a + (k + 1) as f64 * h, &f))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let r = gauss_legendre(16);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // exact up to degree 31
        let v = r.integrate(-1.0, 1.0, |x| x.powi(30));
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn odd_rule_has_centre_node() {
        let r = gauss_legendre(7);
        assert!(r.nodes[3].abs() < 1e-15);
        assert!((r.integrate(0.0, 1.0, |x| x.exp()) - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let j = gauss_jacobi(10, 0.0, 0.0);
        let l = gauss_legendre(10);
        for (a, b) in j.nodes.iter().zip(&l.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in j.weights.iter().zip(&l.weights) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_rule_moments() {
        // ∫_0^2 u^{-1/2} u^3 du = 2^{3.5}/3.5
        let q = singular_left(12, -0.5, 2.0);
        let v: f64 = q.iter().map(|(u, w)| w * u.powi(3)).sum();
        assert!((v - 2f64.powf(3.5) / 3.5).abs() < 1e-12);
        // ∫_0^1 u^{-0.3} e^{-u} du against a fine graded reference
        let q = singular_left(20, -0.3, 1.0);
        let v: f64 = q.iter().map(|(u, w)| w * (-u).exp()).sum();
        let reference = statrs::function::gamma::gamma_li(0.7, 1.0);
        assert!((v - reference).abs() < 1e-13, "{v} {reference}");
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<Complex64> = (0..1000).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum(&xs);
        assert_eq!(s, Complex64::new(499500.0, -499500.0));
    }
}
