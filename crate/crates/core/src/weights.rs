//! Weight sequences (M_p), the associated function M(ρ) and the canonical product ω(z).

use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub const DEFAULT_P_MAX: usize = 256;
pub const DEFAULT_P_TRUNC: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightKind {
    Gevrey { s: f64 },
    Explicit,
}

/// A weight sequence stored through ln M_p, p = 0..=P_max.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    ln_m: Vec<f64>,
    ln_q: Vec<f64>,
    log_convex: bool,
}

impl WeightSequence {
    /// M_p = (p!)^s.
    pub fn gevrey(s: f64, p_max: usize) -> Result<Self> {
        if !(s > 1.0) || !s.is_finite() {
            return invalid(format!(
                "gevrey order s = {s} must exceed 1 (the sum of 1/p^s diverges at s = 1)"
            ));
        }
        if p_max < 32 {
            return invalid(format!("P_max = {p_max} must be at least 32"));
        }
        let ln_m = (0..=p_max).map(|p| s * ln_gamma(p as f64 + 1.0)).collect();
        Ok(Self::from_logs(WeightKind::Gevrey { s }, ln_m))
    }

    /// An explicit finite sequence M_0..M_P with M_0 = 1.
    pub fn explicit(m: &[f64]) -> Result<Self> {
        if m.len() < 2 {
            return invalid("explicit weight sequence needs at least M_0 and M_1");
        }
        if m.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return invalid("weight sequence entries must be positive and finite");
        }
        if (m[0] - 1.0).abs() > 1e-12 {
            return invalid(format!("M_0 = {} but the normalization requires M_0 = 1", m[0]));
        }
        let ln_m = m.iter().map(|v| v.ln()).collect();
        Ok(Self::from_logs(WeightKind::Explicit, ln_m))
    }

    fn from_logs(kind: WeightKind, mut ln_m: Vec<f64>) -> Self {
        ln_m[0] = 0.0;
        let ln_q: Vec<f64> = std::iter::once(f64::NAN)
            .chain(ln_m.windows(2).map(|w| w[1] - w[0]))
            .collect();
        let log_convex = ln_q[1..].windows(2).all(|w| w[1] >= w[0]);
        Self { kind, ln_m, ln_q, log_convex }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn p_max(&self) -> usize {
        self.ln_m.len() - 1
    }

    pub fn ln_m(&self, p: usize) -> f64 {
        self.ln_m[p]
    }

    /// M_p; may overflow to infinity for large p.
    pub fn m(&self, p: usize) -> f64 {
        self.ln_m[p].exp()
    }

    /// Quotient m_p = M_p / M_{p-1}, p ≥ 1.
    pub fn quotient(&self, p: usize) -> f64 {
        self.ln_q[p].exp()
    }

    pub fn ln_quotient(&self, p: usize) -> f64 {
        self.ln_q[p]
    }

    /// Associated function M(ρ) = sup_{p ≤ P_max} ln(ρ^p / M_p).
    pub fn associated(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return invalid(format!("associated function needs ρ > 0, got {rho}"));
        }
        Ok(self.associated_with_index(rho).0)
    }

    /// M(ρ) for ρ ≥ 0 (M(0) = 0), together with the maximizing index.
    pub fn associated_with_index(&self, rho: f64) -> (f64, usize) {
        if !(rho > 0.0) {
            return (0.0, 0);
        }
        let lr = rho.ln();
        let p = if self.log_convex {
            // argmax = #{p ≥ 1 : m_p ≤ ρ}
            self.ln_q[1..].partition_point(|&q| q <= lr)
        } else {
            let mut best = (0.0, 0);
            for p in 1..self.ln_m.len() {
                let v = p as f64 * lr - self.ln_m[p];
                if v > best.0 {
                    best = (v, p);
                }
            }
            best.1
        };
        let v = p as f64 * lr - self.ln_m[p];
        (v.max(0.0), p)
    }

    /// True when the supremum defining M(ρ) sits at the truncation order.
    pub fn saturated(&self, rho: f64) -> bool {
        self.associated_with_index(rho).1 == self.p_max()
    }

    pub fn check_conditions(&self) -> ConditionReport {
        ConditionReport {
            m1: self.check_m1(),
            m2_prime: self.check_m2_prime(),
            m3_prime: self.check_m3_prime(),
        }
    }

    fn check_m1(&self) -> FlagReport {
        let n = self.ln_m.len();
        for p in 1..n - 1 {
            let lhs = 2.0 * self.ln_m[p];
            let rhs = self.ln_m[p - 1] + self.ln_m[p + 1];
            if lhs > rhs + 1e-12 * lhs.abs().max(1.0) {
                return FlagReport { holds: false, witness: Some(p), detail: None };
            }
        }
        FlagReport { holds: true, witness: None, detail: None }
    }

    /// Independent predicate: the quotients m_p are nondecreasing.
    pub fn quotients_nondecreasing(&self) -> bool {
        self.log_convex_with_tolerance()
    }

    fn log_convex_with_tolerance(&self) -> bool {
        self.ln_q[1..]
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0))
    }

    /// (M.2)′: M_{p+1} ≤ A H^p M_p, constants scanned over {2^k : 0 ≤ k ≤ 20};
    /// the witnessing pair with the smallest product A·H is reported.
    fn check_m2_prime(&self) -> FlagReport {
        let ln2 = std::f64::consts::LN_2;
        let mut best: Option<(usize, usize)> = None;
        for kh in 0..=20usize {
            let lh = kh as f64 * ln2;
            let need = (0..self.p_max())
                .map(|p| self.ln_m[p + 1] - self.ln_m[p] - p as f64 * lh)
                .fold(f64::NEG_INFINITY, f64::max);
            if let Some(ka) = (0..=20usize).find(|&ka| ka as f64 * ln2 >= need - 1e-12) {
                if best.map_or(true, |(a, h)| ka + kh < a + h) {
                    best = Some((ka, kh));
                }
            }
        }
        match best {
            Some((ka, kh)) => FlagReport {
                holds: true,
                witness: None,
                detail: Some(M2Constants { a: 2f64.powi(ka as i32), h: 2f64.powi(kh as i32) }),
            },
            None => {
                let lh = 20.0 * ln2;
                let f = |p: usize| self.ln_m[p + 1] - self.ln_m[p] - p as f64 * lh;
                let worst = (0..self.p_max()).max_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap_or(0);
                FlagReport { holds: false, witness: Some(worst), detail: None }
            }
        }
    }

    fn check_m3_prime(&self) -> M3Report {
        let p_max = self.p_max();
        let partial: f64 = (1..=p_max).map(|p| (-self.ln_q[p]).exp()).sum();
        // growth exponent of m_p over the upper half (log-log regression)
        let lo = (p_max / 2).max(1);
        let pts: Vec<(f64, f64)> = (lo..=p_max).map(|p| ((p as f64).ln(), self.ln_q[p])).collect();
        let exponent = if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            if sxx > 0.0 {
                sxy / sxx
            } else {
                0.0
            }
        } else {
            0.0
        };
        let holds = exponent > 1.0;
        let tail = if holds {
            p_max as f64 * (-self.ln_q[p_max]).exp() / (exponent - 1.0)
        } else {
            f64::INFINITY
        };
        M3Report { holds, partial_sum: partial, tail_estimate: tail, growth_exponent: exponent }
    }

    pub fn canonical_product(&self, p_trunc: usize) -> Result<CanonicalProduct> {
        if p_trunc == 0 || p_trunc > self.p_max() {
            return invalid(format!(
                "P_trunc = {p_trunc} must lie in 1..={}",
                self.p_max()
            ));
        }
        Ok(CanonicalProduct { weights: self.clone(), p_trunc })
    }

    pub fn to_config(&self) -> WeightConfig {
        match self.kind {
            WeightKind::Gevrey { s } => {
                WeightConfig::Gevrey { s, p_max: Some(self.p_max()) }
            }
            WeightKind::Explicit => {
                WeightConfig::Explicit { m: self.ln_m.iter().map(|l| l.exp()).collect() }
            }
        }
    }
}

/// JSON form of a weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Gevrey {
        s: f64,
        #[serde(default)]
        p_max: Option<usize>,
    },
    Explicit {
        m: Vec<f64>,
    },
}

impl WeightConfig {
    pub fn build(&self) -> Result<WeightSequence> {
        match self {
            WeightConfig::Gevrey { s, p_max } => {
                WeightSequence::gevrey(*s, p_max.unwrap_or(DEFAULT_P_MAX))
            }
            WeightConfig::Explicit { m } => WeightSequence::explicit(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M2Constants {
    pub a: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagReport {
    pub holds: bool,
    pub witness: Option<usize>,
    pub detail: Option<M2Constants>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M3Report {
    pub holds: bool,
    pub partial_sum: f64,
    pub tail_estimate: f64,
    pub growth_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub m1: FlagReport,
    pub m2_prime: FlagReport,
    pub m3_prime: M3Report,
}

/// ω_P(z) = ∏_{p=1}^{P} (1 + i z / m_p).
#[derive(Debug, Clone)]
pub struct CanonicalProduct {
    weights: WeightSequence,
    p_trunc: usize,
}

impl CanonicalProduct {
    pub fn p_trunc(&self) -> usize {
        self.p_trunc
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// Complex logarithm of ω(z), accumulated factor by factor.
    pub fn ln_eval(&self, z: Complex64) -> Complex64 {
        let iz = Complex64::i() * z;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 1..=self.p_trunc {
            let f = Complex64::new(1.0, 0.0) + iz * (-self.weights.ln_q[p]).exp();
            acc += f.ln();
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z == Complex64::new(0.0, 0.0) {
            return Complex64::new(1.0, 0.0);
        }
        self.ln_eval(z).exp()
    }

    /// ln ω(iλ) = Σ ln(1 - λ/m_p).
    pub fn ln_eval_at_i(&self, lambda: Complex64) -> Complex64 {
        self.ln_eval(Complex64::i() * lambda)
    }

    /// 1/ω(iλ)^n evaluated through logarithms.
    pub fn mollifier(&self, lambda: Complex64, n: u32) -> Complex64 {
        (-(n as f64) * self.ln_eval_at_i(lambda)).exp()
    }

    /// Bound on |ln|ω_full(z)| - ln|ω_P(z)||; infinite once |z| reaches m_{P+1}.
    pub fn tail_bound(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let p_max = self.weights.p_max();
        let mut acc = 0.0;
        for p in self.p_trunc + 1..=p_max {
            let u = r * (-self.weights.ln_q[p]).exp();
            if u >= 1.0 {
                return f64::INFINITY;
            }
            acc += -(1.0 - u).ln();
        }
        if let WeightKind::Gevrey { s } = self.weights.kind {
            // Σ_{p > P_max} u_p/(1-u_p) ≤ r ∫_{P_max}^∞ x^{-s} dx / (1 - u_{P_max})
            let u = r * (-self.weights.ln_q[p_max]).exp();
            if u >= 1.0 {
                return f64::INFINITY;
            }
            acc += r * (p_max as f64).powf(1.0 - s) / (s - 1.0) / (1.0 - u);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_two_small_table() {
        let w = WeightSequence::gevrey(2.0, 32).unwrap();
        let expect = [1.0, 1.0, 4.0, 36.0, 576.0];
        for (p, e) in expect.iter().enumerate() {
            assert!((w.m(p) - e).abs() < 1e-9 * e);
        }
        for p in 1..=32 {
            assert!((w.quotient(p) - (p * p) as f64).abs() < 1e-9 * (p * p) as f64);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(WeightSequence::gevrey(1.0, 64).is_err());
        assert!(WeightSequence::gevrey(2.0, 16).is_err());
        assert!(WeightSequence::explicit(&[2.0, 1.0]).is_err());
        assert!(WeightSequence::explicit(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn zeta_three_halves_partial_sum() {
        // ζ(1.5) = 2.6123753...
        let w = WeightSequence::gevrey(1.5, 64).unwrap();
        let r = w.check_conditions().m3_prime;
        assert!(r.holds);
        let total = r.partial_sum + r.tail_estimate;
        assert!((total - 2.612_375_348_685_488).abs() < 0.05, "{total}");
    }

    #[test]
    fn gevrey_conditions_hold() {
        let w = WeightSequence::gevrey(2.0, 256).unwrap();
        let r = w.check_conditions();
        assert!(r.m1.holds && r.m2_prime.holds && r.m3_prime.holds);
        let c = r.m2_prime.detail.unwrap();
        assert_eq!((c.a, c.h), (1.0, 4.0));
        assert!(WeightSequence::gevrey(1.01, 256).unwrap().check_conditions().m3_prime.holds);
    }

    #[test]
    fn m1_violation_witness() {
        let w = WeightSequence::explicit(&[1.0, 1.0, 4.0, 8.0]).unwrap();
        let r = w.check_conditions();
        assert!(!r.m1.holds);
        assert_eq!(r.m1.witness, Some(2));
        assert!(!w.quotients_nondecreasing());
    }

    #[test]
    fn associated_values() {
        let w = WeightSequence::gevrey(2.0, 256).unwrap();
        assert_eq!(w.associated(1.0).unwrap(), 0.0);
        assert!((w.associated(2.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!(w.associated(10.0).unwrap() >= w.associated(5.0).unwrap());
        assert!(w.associated(0.0).is_err());
        // brute force against the partition-point path
        for &rho in &[0.5, 3.0, 17.0, 1234.5, 9.9e3] {
            let brute = (0..=256)
                .map(|p| p as f64 * f64::ln(rho) - w.ln_m(p))
                .fold(0.0, f64::max);
            assert!((w.associated(rho).unwrap() - brute).abs() < 1e-9);
        }
    }

    #[test]
    fn associated_growth_rate_stabilizes() {
        for s in [2.0, 3.0] {
            let w = WeightSequence::gevrey(s, 256).unwrap();
            let r: Vec<f64> = [1e3, 1e4, 1e5]
                .iter()
                .map(|&rho: &f64| w.associated(rho).unwrap() / rho.powf(1.0 / s))
                .collect();
            assert!(r.iter().all(|v| *v > 0.0));
            for k in 0..2 {
                assert!((r[k + 1] / r[k] - 1.0).abs() < 0.2, "{s} {r:?}");
            }
        }
    }

    #[test]
    fn product_special_values() {
        let w = WeightSequence::gevrey(2.0, 256).unwrap();
        let om = w.canonical_product(128).unwrap();
        assert_eq!(om.eval(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        // ω(i·m_1) contains the factor 1 - m_1/m_1 = 0
        assert_eq!(om.eval(Complex64::new(0.0, 1.0)).norm(), 0.0);
        // on the imaginary axis the factors are real
        let v = om.eval(Complex64::new(0.0, 0.5));
        assert!(v.im.abs() < 1e-14 * v.re.abs());
        let m100 = w.associated(100.0).unwrap();
        assert!(om.eval(Complex64::new(100.0, 0.0)).norm().ln() >= m100);
    }

    #[test]
    fn truncation_within_tail_bound() {
        let w = WeightSequence::gevrey(2.0, 256).unwrap();
        let a = w.canonical_product(64).unwrap();
        let b = w.canonical_product(128).unwrap();
        let m = w.quotient(64) / 10.0;
        for &z in &[
            Complex64::new(m, 0.0),
            Complex64::new(0.3 * m, 0.2 * m),
            Complex64::new(-0.1 * m, 0.05 * m),
        ] {
            let d = (a.ln_eval(z).re - b.ln_eval(z).re).abs();
            assert!(d <= a.tail_bound(z), "{d} {}", a.tail_bound(z));
        }
        assert!(a.tail_bound(Complex64::new(w.quotient(65), 0.0)).is_infinite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn associated_is_monotone_and_convex_in_log(s in 1.2f64..4.0, a in -1.0f64..5.0, d in 0.01f64..2.0) {
                let w = WeightSequence::gevrey(s, 64).unwrap();
                let (r0, r1, r2) = (10f64.powf(a), 10f64.powf(a + d), 10f64.powf(a + 2.0 * d));
                let (m0, m1, m2) = (w.associated(r0).unwrap(), w.associated(r1).unwrap(), w.associated(r2).unwrap());
                prop_assert!(m1 >= m0 && m2 >= m1);
                prop_assert!(2.0 * m1 <= m0 + m2 + 1e-9 * (1.0 + m2));
            }

            #[test]
            fn gevrey_quotients_nondecreasing(s in 1.05f64..6.0) {
                let w = WeightSequence::gevrey(s, 48).unwrap();
                prop_assert!(w.quotients_nondecreasing());
                prop_assert!(w.check_conditions().m1.holds);
            }
        }
    }
}
