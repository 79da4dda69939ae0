//! Chebyshev series on an interval, built from values at Chebyshev points of the second kind.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    /// Interpolate `f` at the D+1 points t_k = mid + half·cos(πk/D).
    pub fn from_fn(a: f64, b: f64, degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = degree.max(1);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let vals: Vec<f64> = (0..=n).map(|k| f(mid + half * (PI * k as f64 / n as f64).cos())).collect();
        Self::from_values(a, b, &vals)
    }

    pub fn from_values(a: f64, b: f64, vals: &[f64]) -> Self {
        let n = vals.len() - 1;
        let table: Vec<f64> = (0..2 * n).map(|m| (PI * m as f64 / n as f64).cos()).collect();
        let mut coeffs = vec![0.0; n + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.5 * (vals[0] + vals[n] * table[(j * n) % (2 * n)]);
            for (k, v) in vals.iter().enumerate().take(n).skip(1) {
                s += v * table[(j * k) % (2 * n)];
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Self { a, b, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw evaluation; the series is not clipped outside [a, b].
    pub fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self { a: self.a, b: self.b, coeffs: vec![0.0] };
        }
        // d_{k-1} = d_{k+1} + 2k c_k, with d_n = d_{n+1} = 0
        let mut d = vec![0.0; n + 2];
        for k in (1..=n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        let s = 2.0 / (self.b - self.a);
        Self { a: self.a, b: self.b, coeffs: d.into_iter().map(|c| c * s).collect() }
    }

    /// Clenshaw–Curtis integral over [a, b].
    pub fn integral(&self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| c * 2.0 / (1.0 - (k * k) as f64))
            .sum();
        0.5 * (self.b - self.a) * s
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { a: self.a + c, b: self.b + c, coeffs: self.coeffs.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials_and_derivatives() {
        let s = ChebSeries::from_fn(-1.0, 3.0, 12, |t| t.powi(5) - 2.0 * t + 1.0);
        for &t in &[-1.0, 0.3, 2.9] {
            assert!((s.eval(t) - (t.powi(5) - 2.0 * t + 1.0)).abs() < 1e-11);
            let d = s.derivative();
            assert!((d.eval(t) - (5.0 * t.powi(4) - 2.0)).abs() < 1e-10);
            let dd = d.derivative();
            assert!((dd.eval(t) - 20.0 * t.powi(3)).abs() < 1e-9);
        }
        // ∫_{-1}^{3} t^5 - 2t + 1 = (729 - 1)/6 - (9 - 1) + 4
        assert!((s.integral() - (728.0 / 6.0 - 8.0 + 4.0)).abs() < 1e-10);
    }

    #[test]
    fn smooth_function_converges() {
        let s = ChebSeries::from_fn(0.0, 2.0, 40, |t| (3.0 * t).sin());
        assert!((s.eval(1.234) - (3.0f64 * 1.234).sin()).abs() < 1e-14);
        assert!((s.integral() - (1.0 - 6f64.cos()) / 3.0).abs() < 1e-14);
    }
}
