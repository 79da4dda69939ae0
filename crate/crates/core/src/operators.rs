//! Discretized operators exposing apply, resolvent and a seminorm family.

use crate::error::{invalid, Error, Result};
use crate::quad::gl32;
use crate::weights::WeightSequence;
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Distance from the spectrum below which a resolvent call is refused.
pub const SINGULAR_DISTANCE: f64 = 1e-8;

/// Grid points in [0, X_max].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    spacing: f64,
    periodic: bool,
}

impl Grid {
    /// n equally spaced points x_j = j·X_max/(n-1).
    pub fn uniform(n: usize, x_max: f64) -> Result<Self> {
        if n < 16 {
            return invalid(format!("grid needs n ≥ 16, got {n}"));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return invalid("grid needs X_max > 0");
        }
        let h = x_max / (n - 1) as f64;
        Ok(Self { points: (0..n).map(|j| j as f64 * h).collect(), spacing: h, periodic: false })
    }

    /// n points x_j = j·L/n of a periodic grid of length L.
    pub fn periodic(n: usize, length: f64) -> Result<Self> {
        if n < 16 {
            return invalid(format!("grid needs n ≥ 16, got {n}"));
        }
        let h = length / n as f64;
        Ok(Self { points: (0..n).map(|j| j as f64 * h).collect(), spacing: h, periodic: true })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn x_max(&self) -> f64 {
        *self.points.last().unwrap()
    }
    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<C> {
        self.points.iter().map(|&x| C::new(f(x), 0.0)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Multiplication,
    Matrix,
    LeftDerivative,
    RobinLaplacian,
    FourierMultiplier,
}

/// A bounded map C commuting with A.
#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer {
    Identity,
    Diagonal(Vec<C>),
    Dense(DMatrix<C>),
}

impl Regularizer {
    pub fn apply(&self, x: &[C]) -> Vec<C> {
        match self {
            Regularizer::Identity => x.to_vec(),
            Regularizer::Diagonal(d) => x.iter().zip(d).map(|(a, b)| a * b).collect(),
            Regularizer::Dense(m) => (m * DVector::from_column_slice(x)).as_slice().to_vec(),
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<C> {
        match self {
            Regularizer::Identity => DMatrix::identity(n, n),
            Regularizer::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            Regularizer::Dense(m) => m.clone(),
        }
    }
}

static IDENTITY: Regularizer = Regularizer::Identity;

pub trait ResolventOperator: Send + Sync {
    fn kind(&self) -> OperatorKind;
    fn dim(&self) -> usize;
    fn grid(&self) -> Option<&Grid> {
        None
    }
    /// A x on the discrete domain.
    fn apply(&self, x: &[C]) -> Result<Vec<C>>;
    /// (λ - A)^{-1} x.
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>>;
    fn regularizer(&self) -> &Regularizer {
        &IDENTITY
    }
    /// Indices on which `apply` is trusted for residual checks.
    fn interior(&self) -> std::ops::Range<usize> {
        0..self.dim()
    }
    fn seminorms(&self) -> SeminormFamily {
        SeminormFamily::new(self.grid().filter(|g| !g.is_periodic()).map(|g| g.spacing()))
    }
    /// Dense matrix of A when the operator is a matrix.
    fn matrix(&self) -> Option<&DMatrix<C>> {
        None
    }
}

fn check_len(x: &[C], n: usize) -> Result<()> {
    if x.len() != n {
        return invalid(format!("state has length {}, operator dimension is {n}", x.len()));
    }
    Ok(())
}

fn sup(x: &[C]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Maximum norm of a complex vector.
pub fn sup_norm(x: &[C]) -> f64 {
    sup(x)
}

// ---------------------------------------------------------------------------
// finite differences

/// Fornberg weights: `w[k][j]` is the weight of node j in the k-th derivative at z.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `deriv` on a uniform grid with `width`-point stencils,
/// centered in the interior and one-sided near the ends.
#[derive(Debug, Clone)]
pub struct Stencil {
    deriv: usize,
    width: usize,
    scale: f64,
    table: HashMap<isize, Vec<f64>>,
}

impl Stencil {
    pub fn new(deriv: usize, width: usize, h: f64) -> Self {
        let mut table = HashMap::new();
        for off in -(width as isize - 1)..=0 {
            let x: Vec<f64> = (0..width).map(|m| (off + m as isize) as f64).collect();
            table.insert(off, fd_weights(0.0, &x, deriv)[deriv].clone());
        }
        Self { deriv, width, scale: h.powi(-(deriv as i32)), table }
    }

    pub fn apply(&self, f: &[C]) -> Vec<C> {
        let n = f.len();
        assert!(n >= self.width);
        (0..n)
            .map(|i| {
                let start = (i as isize - (self.width / 2) as isize).clamp(0, (n - self.width) as isize);
                let w = &self.table[&(start - i as isize)];
                let s: C = w.iter().enumerate().map(|(m, &c)| f[start as usize + m] * c).sum();
                s * self.scale
            })
            .collect()
    }

    pub fn derivative_order(&self) -> usize {
        self.deriv
    }

    /// The derivative at node 0 only.
    pub fn at_left(&self, f: &[C]) -> C {
        let w = &self.table[&0];
        w.iter().zip(f).map(|(c, v)| v * *c).sum::<C>() * self.scale
    }
}

/// f ↦ Σ_{j≤k} sup_i |(D^j f)(x_i)| with D a fourth-order stencil; the
/// sup norm for operators without a grid.
#[derive(Debug, Clone)]
pub struct SeminormFamily {
    stencil: Option<Stencil>,
}

impl SeminormFamily {
    pub fn new(spacing: Option<f64>) -> Self {
        Self { stencil: spacing.map(|h| Stencil::new(1, 5, h)) }
    }

    pub fn norm(&self, f: &[C], k: usize) -> f64 {
        let mut total = sup(f);
        if let Some(s) = &self.stencil {
            if f.len() >= 5 {
                let mut d = f.to_vec();
                for _ in 0..k {
                    d = s.apply(&d);
                    total += sup(&d);
                }
            }
        }
        total
    }
}

// ---------------------------------------------------------------------------
// product integration for ∫_0^{x_j} e^{-k(x_j - s)} f(s) ds

const PI_WIDTH: usize = 6;

fn lagrange_monomials(offset: isize) -> Vec<Vec<f64>> {
    // basis ℓ_m(τ) through nodes τ = offset + m, as monomial coefficients in τ
    let nodes: Vec<f64> = (0..PI_WIDTH).map(|m| (offset + m as isize) as f64).collect();
    (0..PI_WIDTH)
        .map(|m| {
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if j == m {
                    continue;
                }
                denom *= nodes[m] - xj;
                let mut next = vec![0.0; poly.len() + 1];
                for (d, &c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= xj * c;
                }
                poly = next;
            }
            poly.iter().map(|c| c / denom).collect()
        })
        .collect()
}

fn lagrange_tables() -> &'static Vec<(isize, Vec<Vec<f64>>)> {
    static T: OnceLock<Vec<(isize, Vec<Vec<f64>>)>> = OnceLock::new();
    T.get_or_init(|| (-(PI_WIDTH as isize - 2)..=0).map(|o| (o, lagrange_monomials(o))).collect())
}

/// I_k(z) = ∫_0^1 e^{-z(1-τ)} τ^k dτ for k < PI_WIDTH.
fn exp_moments(z: C) -> [C; PI_WIDTH] {
    let mut out = [ZERO; PI_WIDTH];
    if z.norm() <= 16.0 {
        for (x, w) in gl32().on(0.0, 1.0) {
            let e = (-z * (1.0 - x)).exp() * w;
            let mut p = 1.0;
            for o in out.iter_mut() {
                *o += e * p;
                p *= x;
            }
        }
    } else {
        out[0] = (1.0 - (-z).exp()) / z;
        for k in 1..PI_WIDTH {
            out[k] = (1.0 - k as f64 * out[k - 1]) / z;
        }
    }
    out
}

/// u_j = ∫_0^{x_j} e^{-k(x_j - s)} f(s) ds on a uniform grid starting at 0,
/// f interpolated by local degree-5 polynomials; requires Re k ≥ 0.
pub fn exp_sweep(f: &[C], h: f64, k: C) -> Vec<C> {
    let n = f.len();
    let z = k * h;
    let mom = exp_moments(z);
    let decay = (-z).exp();
    let weights: Vec<(isize, Vec<C>)> = lagrange_tables()
        .iter()
        .map(|(o, basis)| {
            let w = basis
                .iter()
                .map(|coef| coef.iter().zip(&mom).map(|(c, m)| m * *c).sum::<C>() * h)
                .collect();
            (*o, w)
        })
        .collect();
    let mut u = vec![ZERO; n];
    for j in 0..n - 1 {
        let start = (j as isize - 2).clamp(0, (n - PI_WIDTH) as isize);
        let o = start - j as isize;
        let w = &weights.iter().find(|(oo, _)| *oo == o).expect("offset table").1;
        let mut acc = u[j] * decay;
        for (m, wm) in w.iter().enumerate() {
            acc += wm * f[start as usize + m];
        }
        u[j + 1] = acc;
    }
    u
}

/// ∫_{x_j}^{X} e^{-k(s - x_j)} f(s) ds.
pub fn exp_sweep_back(f: &[C], h: f64, k: C) -> Vec<C> {
    let rev: Vec<C> = f.iter().rev().copied().collect();
    let mut u = exp_sweep(&rev, h, k);
    u.reverse();
    u
}

// ---------------------------------------------------------------------------
// multiplication operator

/// A f(x) = a(x) f(x).
#[derive(Debug, Clone)]
pub struct Multiplication {
    grid: Grid,
    symbol: Vec<C>,
}

/// a(x) = x + i eˣ.
pub fn example_symbol(x: f64) -> C {
    C::new(x, x.exp())
}

impl Multiplication {
    /// The operator with a(x) = x + i eˣ.
    pub fn new(grid: Grid) -> Result<Self> {
        if grid.x_max() > 20.0 {
            return invalid("multiplication operator needs X_max ≤ 20");
        }
        let symbol = grid.points().iter().map(|&x| example_symbol(x)).collect();
        Ok(Self { grid, symbol })
    }

    pub fn with_symbol(grid: Grid, symbol: Vec<C>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return invalid("symbol length must match the grid");
        }
        Ok(Self { grid, symbol })
    }

    pub fn symbol(&self) -> &[C] {
        &self.symbol
    }
}

impl ResolventOperator for Multiplication {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Multiplication
    }
    fn dim(&self) -> usize {
        self.grid.len()
    }
    fn grid(&self) -> Option<&Grid> {
        Some(&self.grid)
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        Ok(x.iter().zip(&self.symbol).map(|(v, a)| v * a).collect())
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        x.iter()
            .zip(&self.symbol)
            .map(|(v, a)| {
                let d = lambda - a;
                if d.norm() < SINGULAR_DISTANCE {
                    Err(Error::SingularResolvent { lambda, detail: format!("λ within {SINGULAR_DISTANCE} of a({a})") })
                } else {
                    Ok(v / d)
                }
            })
            .collect()
    }
    fn seminorms(&self) -> SeminormFamily {
        SeminormFamily::new(Some(self.grid.spacing()))
    }
}

// ---------------------------------------------------------------------------
// dense matrices

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C>,
    pub vectors: DMatrix<C>,
    pub inverse: DMatrix<C>,
}

#[derive(Debug, Clone)]
pub struct Matrix {
    m: DMatrix<C>,
    eigen: OnceLock<Result<Eigen>>,
}

impl Matrix {
    pub fn new(m: DMatrix<C>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return invalid("matrix operator needs a nonempty square matrix");
        }
        if m.nrows() > 64 {
            return invalid("matrix operator supports n ≤ 64");
        }
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self { m, eigen: OnceLock::new() })
    }

    pub fn diagonal(d: &[C]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    /// V diag(d) V⁻¹ with V random and well conditioned.
    pub fn random_diagonalizable(rng: &mut impl Rng, eigenvalues: &[C]) -> Result<Self> {
        let n = eigenvalues.len();
        loop {
            let v = DMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let sv = v.clone().svd(false, false).singular_values;
            let cond = sv.max() / sv.min();
            if cond < 50.0 {
                let vi = v.clone().try_inverse().expect("well conditioned");
                let d = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
                return Self::new(&v * d * vi);
            }
        }
    }

    /// A random diagonalizable n×n matrix with spectrum in Re λ ∈ [re.0, re.1], |Im λ| ≤ im.
    pub fn random_stable(seed: u64, n: usize, re: (f64, f64), im: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ev: Vec<C> = (0..n).map(|_| C::new(rng.gen_range(re.0..re.1), rng.gen_range(-im..=im))).collect();
        Self::random_diagonalizable(&mut rng, &ev)
    }

    /// Entries as rows of interleaved (re, im) pairs.
    pub fn from_interleaved(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != 2 * n) {
            return invalid("each matrix row needs 2n interleaved re,im values");
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| C::new(rows[i][2 * j], rows[i][2 * j + 1])))
    }

    pub fn to_interleaved(&self) -> Vec<Vec<f64>> {
        let n = self.m.nrows();
        (0..n).map(|i| (0..n).flat_map(|j| [self.m[(i, j)].re, self.m[(i, j)].im]).collect()).collect()
    }

    pub fn dense(&self) -> &DMatrix<C> {
        &self.m
    }

    /// Eigendecomposition; fails for defective or nearly defective matrices.
    pub fn eigen(&self) -> Result<&Eigen> {
        self.eigen.get_or_init(|| eigen_decompose(&self.m)).as_ref().map_err(|e| e.clone())
    }

    /// e^{tA}, t complex.
    pub fn exp(&self, t: C) -> DMatrix<C> {
        (&self.m * t).exp()
    }
}

fn eigen_decompose(m: &DMatrix<C>) -> Result<Eigen> {
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Domain("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let values: Vec<C> = (0..n).map(|i| t[(i, i)]).collect();
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() < 1e-8 * scale {
                return Err(Error::Domain(format!(
                    "repeated eigenvalue {} : diagonalizability cannot be certified",
                    values[i]
                )));
            }
        }
    }
    let mut v = DMatrix::<C>::zeros(n, n);
    for (k, &mu) in values.iter().enumerate() {
        let shift = DMatrix::<C>::identity(n, n) * (mu + C::new(1e-11 * scale, 0.0));
        let lu = (m - shift).lu();
        let mut x = DVector::from_fn(n, |i, _| C::new(1.0 + 0.1 * i as f64, 0.3));
        for _ in 0..3 {
            x = lu.solve(&x).ok_or_else(|| Error::Domain("inverse iteration failed".into()))?;
            let nrm = x.norm();
            x /= C::new(nrm, 0.0);
        }
        v.set_column(k, &x);
    }
    let sv = v.clone().svd(false, false).singular_values;
    if sv.min() < 1e-10 * sv.max() {
        return Err(Error::Domain("eigenvectors are numerically dependent: not diagonalizable".into()));
    }
    let inverse = v.clone().try_inverse().ok_or_else(|| Error::Domain("eigenvector matrix singular".into()))?;
    Ok(Eigen { values, vectors: v, inverse })
}

impl ResolventOperator for Matrix {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Matrix
    }
    fn dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        Ok((&self.m * DVector::from_column_slice(x)).as_slice().to_vec())
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        let n = self.dim();
        let a = DMatrix::<C>::identity(n, n) * lambda - &self.m;
        let lu = a.lu();
        let singular = || Error::SingularResolvent { lambda, detail: "singular linear solve".into() };
        let u = lu.u();
        let scale = self.m.norm().max(lambda.norm()).max(1.0);
        if (0..n).any(|i| u[(i, i)].norm() < 1e-14 * scale) {
            return Err(singular());
        }
        let s = lu.solve(&DVector::from_column_slice(x)).ok_or_else(singular)?;
        Ok(s.as_slice().to_vec())
    }
    fn matrix(&self) -> Option<&DMatrix<C>> {
        Some(&self.m)
    }
}

// ---------------------------------------------------------------------------
// A = -d/ds on E_(h)

/// A = -d/ds with f(0) = 0; the resolvent is ∫_0^x e^{λ(s-x)} f(s) ds.
#[derive(Debug, Clone)]
pub struct LeftDerivative {
    grid: Grid,
    weights: WeightSequence,
    h: f64,
    stencil: Stencil,
}

impl LeftDerivative {
    pub fn new(grid: Grid, weights: WeightSequence, h: f64) -> Result<Self> {
        if grid.is_periodic() {
            return invalid("left derivative needs a non-periodic grid");
        }
        if !(h > 0.0) {
            return invalid("left derivative needs h > 0");
        }
        let stencil = Stencil::new(1, 9, grid.spacing());
        Ok(Self { grid, weights, h, stencil })
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }
    pub fn h(&self) -> f64 {
        self.h
    }
}

impl ResolventOperator for LeftDerivative {
    fn kind(&self) -> OperatorKind {
        OperatorKind::LeftDerivative
    }
    fn dim(&self) -> usize {
        self.grid.len()
    }
    fn grid(&self) -> Option<&Grid> {
        Some(&self.grid)
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        Ok(self.stencil.apply(x).into_iter().map(|v| -v).collect())
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        if !(lambda.re > 0.0) {
            return Err(Error::Domain(format!("left derivative resolvent needs Re λ > 0, got {lambda}")));
        }
        if x[0].norm() > 1e-12 * sup(x).max(f64::MIN_POSITIVE) {
            return Err(Error::Domain("the space requires f(0) = 0".into()));
        }
        Ok(exp_sweep(x, self.grid.spacing(), lambda))
    }
}

// ---------------------------------------------------------------------------
// A_{r,θ} = r e^{iθ} c₀ d²/dx² with c₀u'(0) = βu(0)

#[derive(Debug, Clone)]
pub struct RobinLaplacian {
    grid: Grid,
    c0: f64,
    beta: f64,
    rot: C,
    d1: Stencil,
    d2: Stencil,
}

impl RobinLaplacian {
    pub fn new(grid: Grid, c0: f64, beta: f64, r: f64, theta: f64) -> Result<Self> {
        if grid.is_periodic() {
            return invalid("Robin Laplacian needs a non-periodic grid");
        }
        if !(c0 > 0.0) || !(beta > 0.0) || !(r > 0.0) {
            return invalid("Robin Laplacian needs c0, β, r > 0");
        }
        if !(theta.abs() < PI / 2.0) {
            return invalid("Robin Laplacian needs |θ| < π/2");
        }
        let h = grid.spacing();
        Ok(Self {
            grid,
            c0,
            beta,
            rot: C::from_polar(r, theta),
            d1: Stencil::new(1, 9, h),
            d2: Stencil::new(2, 10, h),
        })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// r e^{iθ}.
    pub fn rotation(&self) -> C {
        self.rot
    }

    /// k = √(λ/(r e^{iθ} c₀)) on the principal branch.
    pub fn wavenumber(&self, lambda: C) -> Result<C> {
        let mu = lambda / self.rot;
        if mu.im.abs() <= 1e-14 * mu.norm() && mu.re <= 0.0 {
            return Err(Error::Domain(format!("λ/(re^(iθ)) = {mu} lies on (-∞, 0]")));
        }
        Ok((mu / self.c0).sqrt())
    }

    /// (c₀k - β)/(c₀k + β).
    pub fn boundary_factor(&self, k: C) -> C {
        (k * self.c0 - self.beta) / (k * self.c0 + self.beta)
    }

    /// |c₀u'(0) - βu(0)|.
    pub fn robin_residual(&self, u: &[C]) -> f64 {
        (self.d1.at_left(u) * self.c0 - u[0] * self.beta).norm()
    }
}

impl ResolventOperator for RobinLaplacian {
    fn kind(&self) -> OperatorKind {
        OperatorKind::RobinLaplacian
    }
    fn dim(&self) -> usize {
        self.grid.len()
    }
    fn grid(&self) -> Option<&Grid> {
        Some(&self.grid)
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        let s = self.rot * self.c0;
        Ok(self.d2.apply(x).into_iter().map(|v| v * s).collect())
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        check_len(x, self.dim())?;
        let k = self.wavenumber(lambda)?;
        let h = self.grid.spacing();
        let fwd = exp_sweep(x, h, k);
        let back = exp_sweep_back(x, h, k);
        let rho = self.boundary_factor(k);
        let pre = 1.0 / (self.rot * 2.0 * self.c0 * k);
        Ok(self
            .grid
            .points()
            .iter()
            .enumerate()
            .map(|(j, &xj)| (fwd[j] + back[j] + rho * (-k * xj).exp() * back[0]) * pre)
            .collect())
    }
    fn interior(&self) -> std::ops::Range<usize> {
        5..self.dim() - 5
    }
}

// ---------------------------------------------------------------------------
// periodic Fourier multipliers

/// a(ξ) = Σ c_k ξ^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSymbol {
    /// Coefficients as [re, im] pairs, lowest degree first.
    pub coeffs: Vec<[f64; 2]>,
}

impl PolynomialSymbol {
    pub fn eval(&self, xi: f64) -> C {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * xi + C::new(c[0], c[1]))
    }
}

pub struct FourierMultiplier {
    grid: Grid,
    values: Vec<C>,
    fft: Arc<dyn rustfft::Fft<f64>>,
    ifft: Arc<dyn rustfft::Fft<f64>>,
}

impl std::fmt::Debug for FourierMultiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierMultiplier").field("n", &self.values.len()).finish()
    }
}

impl FourierMultiplier {
    /// Periodic grid of n points on [0, 2π); frequencies ξ ∈ {-n/2, …, n/2 - 1}.
    pub fn new(symbol: impl Fn(f64) -> C, n: usize) -> Result<Self> {
        let grid = Grid::periodic(n, 2.0 * PI)?;
        let values = (0..n)
            .map(|k| {
                let xi = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
                symbol(xi)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self { grid, values, fft: planner.plan_fft_forward(n), ifft: planner.plan_fft_inverse(n) })
    }

    fn multiply(&self, x: &[C], m: impl Fn(C) -> Result<C>) -> Result<Vec<C>> {
        check_len(x, self.values.len())?;
        let mut buf = x.to_vec();
        self.fft.process(&mut buf);
        for (b, &a) in buf.iter_mut().zip(&self.values) {
            *b *= m(a)?;
        }
        self.ifft.process(&mut buf);
        let s = 1.0 / buf.len() as f64;
        Ok(buf.into_iter().map(|v| v * s).collect())
    }
}

impl ResolventOperator for FourierMultiplier {
    fn kind(&self) -> OperatorKind {
        OperatorKind::FourierMultiplier
    }
    fn dim(&self) -> usize {
        self.values.len()
    }
    fn grid(&self) -> Option<&Grid> {
        Some(&self.grid)
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        self.multiply(x, Ok)
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        self.multiply(x, |a| {
            let d = lambda - a;
            if d.norm() < SINGULAR_DISTANCE {
                Err(Error::SingularResolvent { lambda, detail: format!("λ within {SINGULAR_DISTANCE} of a(ξ) = {a}") })
            } else {
                Ok(1.0 / d)
            }
        })
    }
}

// ---------------------------------------------------------------------------
// wrappers

/// The same operator with a regularizer C attached.
pub struct WithRegularizer {
    inner: Arc<dyn ResolventOperator>,
    c: Regularizer,
}

impl WithRegularizer {
    pub fn new(inner: Arc<dyn ResolventOperator>, c: Regularizer) -> Result<Self> {
        if let Regularizer::Diagonal(d) = &c {
            check_len(d, inner.dim())?;
        }
        if let Regularizer::Dense(m) = &c {
            if m.nrows() != inner.dim() || m.ncols() != inner.dim() {
                return invalid("regularizer dimension mismatch");
            }
        }
        Ok(Self { inner, c })
    }
}

impl ResolventOperator for WithRegularizer {
    fn kind(&self) -> OperatorKind {
        self.inner.kind()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn grid(&self) -> Option<&Grid> {
        self.inner.grid()
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        self.inner.apply(x)
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        self.inner.resolvent(lambda, x)
    }
    fn regularizer(&self) -> &Regularizer {
        &self.c
    }
    fn interior(&self) -> std::ops::Range<usize> {
        self.inner.interior()
    }
    fn seminorms(&self) -> SeminormFamily {
        self.inner.seminorms()
    }
    fn matrix(&self) -> Option<&DMatrix<C>> {
        self.inner.matrix()
    }
}

/// R(λ)P with P zeroing the listed coordinates: a deliberately degenerate resolvent.
pub struct Projected {
    inner: Arc<dyn ResolventOperator>,
    killed: Vec<usize>,
}

impl Projected {
    pub fn new(inner: Arc<dyn ResolventOperator>, killed: Vec<usize>) -> Self {
        Self { inner, killed }
    }
    fn project(&self, x: &[C]) -> Vec<C> {
        let mut y = x.to_vec();
        for &k in &self.killed {
            if k < y.len() {
                y[k] = ZERO;
            }
        }
        y
    }
}

impl ResolventOperator for Projected {
    fn kind(&self) -> OperatorKind {
        self.inner.kind()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn grid(&self) -> Option<&Grid> {
        self.inner.grid()
    }
    fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        self.inner.apply(x)
    }
    fn resolvent(&self, lambda: C, x: &[C]) -> Result<Vec<C>> {
        self.inner.resolvent(lambda, &self.project(x))
    }
    fn regularizer(&self) -> &Regularizer {
        self.inner.regularizer()
    }
    fn seminorms(&self) -> SeminormFamily {
        self.inner.seminorms()
    }
    fn matrix(&self) -> Option<&DMatrix<C>> {
        self.inner.matrix()
    }
}

// ---------------------------------------------------------------------------
// configs

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "X_max")]
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Multiplication { grid: GridConfig },
    /// Rows of interleaved re, im entries.
    Matrix { entries: Vec<Vec<f64>> },
    LeftDerivative { grid: GridConfig, weights: crate::weights::WeightConfig, h: f64 },
    RobinLaplacian { grid: GridConfig, c0: f64, beta: f64, r: f64, theta: f64 },
    FourierMultiplier { n: usize, symbol: PolynomialSymbol },
}

impl OperatorConfig {
    pub fn build(&self) -> Result<Arc<dyn ResolventOperator>> {
        Ok(match self {
            OperatorConfig::Multiplication { grid } => Arc::new(Multiplication::new(Grid::uniform(grid.n, grid.x_max)?)?),
            OperatorConfig::Matrix { entries } => Arc::new(Matrix::from_interleaved(entries)?),
            OperatorConfig::LeftDerivative { grid, weights, h } => {
                Arc::new(LeftDerivative::new(Grid::uniform(grid.n, grid.x_max)?, weights.build()?, *h)?)
            }
            OperatorConfig::RobinLaplacian { grid, c0, beta, r, theta } => {
                Arc::new(RobinLaplacian::new(Grid::uniform(grid.n, grid.x_max)?, *c0, *beta, *r, *theta)?)
            }
            OperatorConfig::FourierMultiplier { n, symbol } => {
                let s = symbol.clone();
                Arc::new(FourierMultiplier::new(move |xi| s.eval(xi), *n)?)
            }
        })
    }
}

// ---------------------------------------------------------------------------
// equicontinuity scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityRow {
    pub k: usize,
    /// sup of weight·‖R(λ)Cx‖_k / ‖x‖_{k'} for k' = k, k+1, k+2.
    pub ratios: [f64; 3],
    /// Smallest k' whose ratio stays below the cap.
    pub bounded_with: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub cap: f64,
    pub samples: usize,
    pub rows: Vec<EquicontinuityRow>,
}

/// Finite-sample surrogate for equicontinuity of {weight(λ)·R(λ)C : λ sampled}.
pub fn equicontinuity_scan(
    op: &dyn ResolventOperator,
    lambdas: &[C],
    weight: impl Fn(C) -> f64,
    probes: &[Vec<C>],
    k_max: usize,
    cap: f64,
) -> Result<EquicontinuityReport> {
    if probes.is_empty() || probes.iter().any(|p| sup(p) == 0.0) {
        return invalid("equicontinuity scan needs nonzero probes");
    }
    let semi = op.seminorms();
    let mut sups = vec![[0.0f64; 3]; k_max + 1];
    for x in probes {
        let cx = op.regularizer().apply(x);
        let denoms: Vec<f64> = (0..=k_max + 2).map(|k| semi.norm(x, k)).collect();
        for &l in lambdas {
            let w = weight(l);
            if w == 0.0 {
                continue;
            }
            let r = op.resolvent(l, &cx)?;
            for (k, row) in sups.iter_mut().enumerate() {
                let num = w * semi.norm(&r, k);
                for (d, s) in row.iter_mut().enumerate() {
                    *s = s.max(num / denoms[k + d]);
                }
            }
        }
    }
    Ok(EquicontinuityReport {
        cap,
        samples: lambdas.len(),
        rows: sups
            .into_iter()
            .enumerate()
            .map(|(k, ratios)| EquicontinuityRow {
                k,
                ratios,
                bounded_with: ratios.iter().position(|&r| r <= cap).map(|d| k + d),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::Contour;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn max_diff(a: &[C], b: &[C]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    fn consistency(op: &dyn ResolventOperator, lambda: C, x: &[C]) -> f64 {
        let u = op.resolvent(lambda, x).unwrap();
        let au = op.apply(&u).unwrap();
        let r = op.interior();
        let lhs: Vec<C> = au[r.clone()].to_vec();
        let rhs: Vec<C> = u[r.clone()].iter().zip(&x[r]).map(|(u, x)| lambda * u - x).collect();
        max_diff(&lhs, &rhs) / sup(x)
    }

    #[test]
    fn fornberg_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        let s = Stencil::new(1, 9, 0.01);
        let g = Grid::uniform(200, 1.99).unwrap();
        let d = s.apply(&g.sample(|x| x.sin()));
        for (x, v) in g.points().iter().zip(&d) {
            assert!((v.re - x.cos()).abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn multiplication_examples() {
        let g = Grid::uniform(32, 4.0).unwrap();
        let op = Multiplication::new(g.clone()).unwrap();
        let mut e0 = vec![ZERO; 32];
        e0[0] = c(1.0, 0.0);
        let r = op.resolvent(c(2.0, 0.0), &e0).unwrap();
        assert!((r[0] - c(0.4, 0.2)).norm() < 1e-15);
        let f = g.sample(|x| (x - 1.0).powi(2));
        let lam = c(5.0, 3.0);
        let af = op.apply(&f).unwrap();
        let lf: Vec<C> = f.iter().zip(&af).map(|(f, a)| lam * f - a).collect();
        assert!(max_diff(&op.resolvent(lam, &lf).unwrap(), &f) < 1e-10 * sup(&f));
        assert!(consistency(&op, lam, &f) < 1e-8);
        let on = example_symbol(g.points()[3]) + c(1e-9, 0.0);
        assert!(matches!(op.resolvent(on, &f), Err(Error::SingularResolvent { .. })));
        assert!(Multiplication::new(Grid::uniform(32, 25.0).unwrap()).is_err());
    }

    #[test]
    fn matrix_examples() {
        let z = Matrix::new(DMatrix::zeros(3, 3)).unwrap();
        let x = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let lam = c(0.5, 2.0);
        let r = z.resolvent(lam, &x).unwrap();
        assert!(max_diff(&r, &x.iter().map(|v| v / lam).collect::<Vec<_>>()) < 1e-15);
        let d = Matrix::diagonal(&[c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let r = d.resolvent(c(1.0, 0.0), &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((r[0] - c(0.5, 0.0)).norm() < 1e-15 && (r[1] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(d.resolvent(c(-1.0, 0.0), &[c(1.0, 0.0), ZERO]), Err(Error::SingularResolvent { .. })));
        let m = Matrix::random_stable(7, 4, (-3.0, -0.2), 3.0).unwrap();
        let x: Vec<C> = (0..4).map(|k| c(k as f64 - 1.5, 0.5)).collect();
        assert!(consistency(&m, c(0.3, -1.7), &x) < 1e-10);
    }

    #[test]
    fn eigendecomposition_and_exponential() {
        let m = Matrix::random_stable(3, 4, (-2.0, -0.5), 2.0).unwrap();
        let e = m.eigen().unwrap();
        let rebuilt = &e.vectors * DMatrix::from_diagonal(&DVector::from_column_slice(&e.values)) * &e.inverse;
        assert!((rebuilt - m.dense()).norm() < 1e-10);
        let t = 0.7;
        let via_eig = &e.vectors
            * DMatrix::from_diagonal(&DVector::from_iterator(4, e.values.iter().map(|v| (v * t).exp())))
            * &e.inverse;
        assert!((via_eig - m.exp(c(t, 0.0))).norm() < 1e-11);
        let jordan = Matrix::new(DMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(1.0, 0.0), ZERO, c(-1.0, 0.0)])).unwrap();
        assert!(jordan.eigen().is_err());
    }

    #[test]
    fn left_derivative_examples() {
        let g = Grid::uniform(401, 8.0).unwrap();
        let w = WeightSequence::gevrey(2.0, 64).unwrap();
        let op = LeftDerivative::new(g.clone(), w, 1.0).unwrap();
        let u = op.resolvent(c(1.0, 0.0), &g.sample(|x| x)).unwrap();
        for (x, v) in g.points().iter().zip(&u) {
            assert!((v.re - (x - 1.0 + (-x).exp())).abs() < 1e-13, "{x}");
        }
        assert!(op.resolvent(c(1.0, 0.0), &vec![ZERO; 401]).unwrap().iter().all(|v| *v == ZERO));
        assert!(op.resolvent(c(0.0, 1.0), &g.sample(|x| x)).is_err());
        assert!(op.resolvent(c(1.0, 0.0), &g.sample(|_| 1.0)).is_err());
        let f = g.sample(|x| x * x * (-x).exp());
        assert!(consistency(&op, c(2.0, 0.0), &f) < 1e-6);
        // large |λ| goes through the moment recurrence; the probe vanishes near 0
        // so that the e^{-λx} boundary layer is absent
        let b = g.sample(|x| TestBump::eval(x, 1.0, 5.0));
        assert!(consistency(&op, c(3.0, 900.0), &b) < 1e-6);
    }

    #[test]
    fn moments_agree_across_branches() {
        for &z in &[c(15.9, 0.5), c(3.0, 15.0), c(0.01, -12.0)] {
            let q = exp_moments(z);
            let mut rec = [ZERO; PI_WIDTH];
            rec[0] = (1.0 - (-z).exp()) / z;
            for k in 1..PI_WIDTH {
                rec[k] = (1.0 - k as f64 * rec[k - 1]) / z;
            }
            if z.norm() > 10.0 {
                assert!(max_diff(&q, &rec) < 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn robin_examples() {
        let g = Grid::uniform(1501, 30.0).unwrap();
        let op = RobinLaplacian::new(g.clone(), 1.0, 0.7, 1.0, 0.0).unwrap();
        let tiny = RobinLaplacian::new(g.clone(), 1.0, 1e-12, 1.0, 0.0).unwrap();
        let k = tiny.wavenumber(c(4.0, 0.0)).unwrap();
        assert!((tiny.boundary_factor(k) - 1.0).norm() < 1e-11);
        let big = RobinLaplacian::new(g.clone(), 1.0, 1e12, 1.0, 0.0).unwrap();
        assert!((big.boundary_factor(k) + 1.0).norm() < 1e-11);
        let f: Vec<C> = g.points().iter().map(|&x| c(TestBump::eval(x, 1.0, 5.0), 0.0)).collect();
        assert!(consistency(&op, c(4.0, 0.0), &f) < 1e-6);
        let u = op.resolvent(c(4.0, 0.0), &f).unwrap();
        assert!(op.robin_residual(&u) <= 1e-5 * sup(&u), "{}", op.robin_residual(&u));
        assert!(op.resolvent(c(-1.0, 0.0), &f).is_err());
        let rot = RobinLaplacian::new(g, 1.0, 0.7, 2.0, 0.4).unwrap();
        assert!(consistency(&rot, c(3.0, 2.0), &f) < 1e-6);
        assert!(rot.robin_residual(&rot.resolvent(c(3.0, 2.0), &f).unwrap()) <= 1e-5 * sup(&f));
    }

    struct TestBump;
    impl TestBump {
        fn eval(x: f64, a: f64, b: f64) -> f64 {
            crate::testfn::TestFunction::bump(a, b).unwrap().eval(x)
        }
    }

    #[test]
    fn fourier_examples() {
        let zero = FourierMultiplier::new(|_| ZERO, 32).unwrap();
        let g = Grid::periodic(32, 2.0 * PI).unwrap();
        let f = g.sample(|x| x.sin() + 0.3 * (3.0 * x).cos());
        let lam = c(2.0, 1.0);
        let r = zero.resolvent(lam, &f).unwrap();
        assert!(max_diff(&r, &f.iter().map(|v| v / lam).collect::<Vec<_>>()) < 1e-14);
        let lap = FourierMultiplier::new(|xi| c(-xi * xi, 0.0), 32).unwrap();
        let mode: Vec<C> = g.points().iter().map(|&x| C::from_polar(1.0, x)).collect();
        let r = lap.resolvent(c(1.0, 0.0), &mode).unwrap();
        assert!(max_diff(&r, &mode.iter().map(|v| v * 0.5).collect::<Vec<_>>()) < 1e-14);
        assert!(consistency(&lap, lam, &f) < 1e-12);
        assert!(lap.resolvent(c(-4.0, 0.0), &f).is_err());
    }

    #[test]
    fn regularizer_commutes_and_seminorms_are_monotone() {
        let g = Grid::uniform(64, 4.0).unwrap();
        let op = Multiplication::new(g.clone()).unwrap();
        let d: Vec<C> = g.points().iter().map(|&x| c(1.0 / (1.0 + x), 0.0)).collect();
        let reg = Regularizer::Diagonal(d);
        let f = g.sample(|x| (-x * x).exp());
        let lhs = op.apply(&reg.apply(&f)).unwrap();
        let rhs = reg.apply(&op.apply(&f).unwrap());
        assert!(max_diff(&lhs, &rhs) <= 1e-10 * sup(&lhs));
        let s = op.seminorms();
        for k in 0..4 {
            assert!(s.norm(&f, k) <= s.norm(&f, k + 1));
        }
    }

    #[test]
    fn resolvent_identity_and_commutation() {
        let g = Grid::uniform(401, 8.0).unwrap();
        let ops: Vec<Box<dyn ResolventOperator>> = vec![
            Box::new(Matrix::random_stable(11, 4, (-2.0, -0.1), 2.0).unwrap()),
            Box::new(Multiplication::new(Grid::uniform(64, 3.0).unwrap()).unwrap()),
            Box::new(LeftDerivative::new(g.clone(), WeightSequence::gevrey(2.0, 64).unwrap(), 1.0).unwrap()),
            // R(μ)x only decays like e^{-Re k·x}, so the half-line is cut far out
            Box::new(RobinLaplacian::new(Grid::uniform(1501, 30.0).unwrap(), 1.0, 0.5, 1.0, 0.0).unwrap()),
        ];
        let (l, m) = (c(2.0, 1.0), c(1.5, -3.0));
        for op in &ops {
            let n = op.dim();
            let x: Vec<C> = match op.grid() {
                Some(g) => g.sample(|x| TestBump::eval(x, 0.5, 2.5)),
                None => (0..n).map(|k| c(1.0, k as f64)).collect(),
            };
            let rl = op.resolvent(l, &x).unwrap();
            let rm = op.resolvent(m, &x).unwrap();
            let rlm = op.resolvent(l, &rm).unwrap();
            let lhs: Vec<C> = rl.iter().zip(&rm).map(|(a, b)| a - b).collect();
            let rhs: Vec<C> = rlm.iter().map(|v| v * (m - l)).collect();
            let e = max_diff(&lhs, &rhs);
            assert!(e <= 1e-7 * sup(&x), "{:?} {e}", op.kind());
            let ax = op.apply(&x).unwrap();
            let a = op.resolvent(l, &ax).unwrap();
            let b = op.apply(&rl).unwrap();
            let r = op.interior();
            let e = max_diff(&a[r.clone()], &b[r]);
            assert!(e <= 1e-7 * sup(&ax), "{:?} {e} {}", op.kind(), sup(&ax));
        }
    }

    #[test]
    fn equicontinuity_examples() {
        let op = Matrix::diagonal(&[c(-1.0, 0.0)]).unwrap();
        let lams: Vec<C> = (-50..=50).map(|k| c(1.0, k as f64 * 0.5)).collect();
        let probes = vec![vec![c(1.0, 0.0)]];
        let rep = equicontinuity_scan(&op, &lams, |_| 1.0, &probes, 1, 1.0).unwrap();
        assert!((rep.rows[0].ratios[0] - 0.5).abs() < 1e-15);
        assert_eq!(rep.rows[0].bounded_with, Some(0));
        let zero = equicontinuity_scan(&op, &lams, |_| 0.0, &probes, 1, 1.0).unwrap();
        assert!(zero.rows.iter().all(|r| r.ratios == [0.0; 3]));
        assert!(equicontinuity_scan(&op, &lams, |_| 1.0, &[vec![ZERO]], 1, 1.0).is_err());

        let g = Grid::uniform(64, 3.0).unwrap();
        let mult = Multiplication::new(g.clone()).unwrap();
        let contour = Contour::gevrey_power(1.0, 2.0, 2.0, 300.0, 2000).unwrap();
        let lams: Vec<C> = contour.nodes().iter().map(|n| n.lambda).collect();
        let probes = vec![g.sample(|x| (-x).exp()), g.sample(|x| TestBump::eval(x, 0.2, 2.8))];
        let rep = equicontinuity_scan(&mult, &lams, |l| (-l.norm().sqrt()).exp(), &probes, 2, 10.0).unwrap();
        assert!(rep.rows.iter().all(|r| r.bounded_with.is_some()), "{rep:?}");
    }

    #[test]
    fn config_round_trip() {
        let cfg = OperatorConfig::RobinLaplacian { grid: GridConfig { n: 64, x_max: 5.0 }, c0: 1.0, beta: 0.5, r: 1.0, theta: 0.0 };
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"X_max\""));
        assert_eq!(serde_json::from_str::<OperatorConfig>(&s).unwrap(), cfg);
        let m = Matrix::random_stable(1, 3, (-1.0, -0.5), 1.0).unwrap();
        let cfg = OperatorConfig::Matrix { entries: m.to_interleaved() };
        let op = cfg.build().unwrap();
        assert_eq!(op.matrix().unwrap(), m.dense());
        assert!(serde_json::from_str::<OperatorConfig>(r#"{"kind":"matrix","entries":[],"extra":1}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn matrix_resolvent_identity(seed in 0u64..1000, lr in 0.1f64..3.0, li in -5.0f64..5.0, mr in 0.1f64..3.0, mi in -5.0f64..5.0) {
                let m = Matrix::random_stable(seed, 4, (-2.0, -0.2), 1.0).unwrap();
                let (l, mu) = (c(lr, li), c(mr, mi));
                let x: Vec<C> = (0..4).map(|k| c(1.0 + k as f64, -0.5 * k as f64)).collect();
                let rl = m.resolvent(l, &x).unwrap();
                let rm = m.resolvent(mu, &x).unwrap();
                let rlrm = m.resolvent(l, &rm).unwrap();
                let lhs: Vec<C> = rl.iter().zip(&rm).map(|(a, b)| a - b).collect();
                let rhs: Vec<C> = rlrm.iter().map(|v| v * (mu - l)).collect();
                let scale = rl.iter().chain(&rm).fold(0.0f64, |s, v| s.max(v.norm()));
                prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * scale);
                prop_assert!(consistency(&m, l, &x) <= 1e-12);
            }
        }
    }
}
