//! Frozen values from high-precision quadrature of the defining integrals.

use regsemi::contour::{Contour, ContourConfig};
use regsemi::engine::{Normalization, SemigroupAction};
use regsemi::operators::{Matrix, OperatorConfig};
use regsemi::testfn::TestFunction;
use regsemi::weights::WeightSequence;
use regsemi::C64;
use std::sync::Arc;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// ∫ bump_[0,1], ∫ bump_[0,1] e^{-t}
const BUMP01_MASS: f64 = 0.221996908084039718911524460585;
const BUMP01_LAPLACE_M1: f64 = 0.137327785751339467999711101964;
// ∫ bump_[0.2,1.2](t) e^{tA}(1,1)ᵀ dt for A = [[-1, 0.5], [0, -2]]
const TRIANGULAR: [f64; 2] = [0.139054596345375123003269755228, 0.0591942516494274821152775255202];
// ∫ bump_[0.2,1.2](t) e^{(-0.5+2i)t} dt
const COMPLEX_SCALAR: (f64, f64) = (0.0304361107953936993022222292474, 0.141952891854556090537182516526);
// ∏_{p≤128} (1 + 1/p²), the gevrey(2) canonical product at iλ = i·(-1)
const PRODUCT_AT_M1: f64 = 3.64758175539627107813334788294;

#[test]
fn bump_mass_and_scalar_action() {
    let phi = TestFunction::bump(0.0, 1.0).unwrap();
    assert!((phi.laplace_hat(c(0.0, 0.0)).re - BUMP01_MASS).abs() < 1e-13);
    let op = Matrix::diagonal(&[c(-1.0, 0.0)]).unwrap();
    let sa = SemigroupAction::distribution(Arc::new(op), Contour::vertical_line(1.0, 4000.0, 24000).unwrap());
    let v = sa.gd_action(&phi, &[c(1.0, 0.0)]).unwrap().value[0];
    assert!((v - BUMP01_LAPLACE_M1).norm() < 1e-11, "{v}");
}

#[test]
fn minus_i_prefactor_is_two_pi_larger() {
    let phi = TestFunction::bump(0.0, 1.0).unwrap();
    let op = Arc::new(Matrix::diagonal(&[c(-1.0, 0.0)]).unwrap());
    let line = Contour::vertical_line(1.0, 4000.0, 24000).unwrap();
    let a = SemigroupAction::distribution(op.clone(), line.clone()).gd_action(&phi, &[c(1.0, 0.0)]).unwrap().value[0];
    let b = SemigroupAction::distribution(op, line).with_normalization(Normalization::MinusI).gd_action(&phi, &[c(1.0, 0.0)]).unwrap().value[0];
    assert!((b / a - std::f64::consts::TAU).norm() < 1e-10);
}

#[test]
fn non_normal_matrix_from_json_config() {
    let cfg: OperatorConfig = serde_json::from_str(r#"{"kind": "matrix", "entries": [[-1, 0, 0.5, 0], [0, 0, -2, 0]]}"#).unwrap();
    let op = cfg.build().unwrap();
    let contour: ContourConfig = serde_json::from_str(r#"{"shape": {"kind": "gevrey_power", "a": 1.0, "b": 2.0, "s": 3.0}, "T": 4000.0, "N": 24000}"#).unwrap();
    let sa = SemigroupAction::distribution(op, contour.build().unwrap());
    let phi = TestFunction::bump(0.2, 1.2).unwrap();
    let v = sa.gd_action(&phi, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap().value;
    for (got, want) in v.iter().zip(TRIANGULAR) {
        assert!((got - want).norm() < 1e-10 * want, "{got} vs {want}");
    }
}

#[test]
fn complex_eigenvalue() {
    let op = Matrix::diagonal(&[c(-0.5, 2.0)]).unwrap();
    let sa = SemigroupAction::distribution(Arc::new(op), Contour::vertical_line(1.0, 4000.0, 24000).unwrap());
    let phi = TestFunction::bump(0.2, 1.2).unwrap();
    let v = sa.gd_action(&phi, &[c(1.0, 0.0)]).unwrap().value[0];
    assert!((v - c(COMPLEX_SCALAR.0, COMPLEX_SCALAR.1)).norm() < 1e-11, "{v}");
}

#[test]
fn mollified_scalar_semigroup() {
    let w = WeightSequence::gevrey(2.0, 256).unwrap();
    let op = Arc::new(Matrix::diagonal(&[c(-1.0, 0.0)]).unwrap());
    let contour = Contour::ultralog(1.0, 0.5, 1.0, &w, 400.0, 4000).unwrap();
    let sa = SemigroupAction::pointwise(op, contour, &w, 4).unwrap();
    let s = sa.mollified_semigroup(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(1.0, 0.0)]).unwrap();
    let reg = PRODUCT_AT_M1.powi(-4);
    assert!((s[0][0] - reg).norm() < 1e-10 * reg, "{}", s[0][0]);
    assert!((s[1][0] - reg * (-0.5f64).exp()).norm() < 1e-10 * reg, "{}", s[1][0]);
}
