//! Oriented integration paths in ℂ with composite Gauss–Legendre panels.
//!
//! Every path is parametrized so that Im λ is nondecreasing along the node
//! sequence. Arms are parametrized by Im λ; cusps, corners and the kinks of
//! the associated function become panel breakpoints.

use crate::error::{invalid, Error, Result};
use crate::quad::{gl16, legendre_values, pairwise_sum, pairwise_sum_vec, PANEL};
use crate::weights::{WeightConfig, WeightSequence};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::rc::Rc;
use std::sync::OnceLock;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Lower,
    Middle,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub lambda: C,
    /// dλ/dτ times the Gauss weight, signed by orientation.
    pub weight: C,
    pub arm: Arm,
}

#[derive(Debug, Clone)]
pub enum Shape {
    Vertical { abscissa: f64 },
    ExpRegion { a: f64, b: f64 },
    GevreyPower { a: f64, b: f64, s: f64 },
    Ultralog { alpha: f64, beta: f64, l: f64, weights: WeightSequence },
    OmegaRegion { l: f64, beta: f64, weights: WeightSequence },
    /// Two rays λ = v + ρ e^{±i(π/2+δ)}, used for complex times.
    Sector { vertex: f64, delta: f64 },
}

/// Serializable contour description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Vertical { abscissa: f64 },
    ExpRegion { a: f64, b: f64 },
    GevreyPower { a: f64, b: f64, s: f64 },
    Ultralog { alpha: f64, beta: f64, l: f64, weights: WeightConfig },
    OmegaRegion { l: f64, beta: f64, weights: WeightConfig },
    Sector { vertex: f64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub shape: ShapeConfig,
    #[serde(rename = "T")]
    pub t_max: f64,
    #[serde(rename = "N")]
    pub nodes: usize,
}

impl ContourConfig {
    pub fn build(&self) -> Result<Contour> {
        let shape = match &self.shape {
            ShapeConfig::Vertical { abscissa } => Shape::Vertical { abscissa: *abscissa },
            ShapeConfig::ExpRegion { a, b } => Shape::ExpRegion { a: *a, b: *b },
            ShapeConfig::GevreyPower { a, b, s } => Shape::GevreyPower { a: *a, b: *b, s: *s },
            ShapeConfig::Ultralog { alpha, beta, l, weights } => Shape::Ultralog {
                alpha: *alpha,
                beta: *beta,
                l: *l,
                weights: weights.build()?,
            },
            ShapeConfig::OmegaRegion { l, beta, weights } => Shape::OmegaRegion {
                l: *l,
                beta: *beta,
                weights: weights.build()?,
            },
            ShapeConfig::Sector { vertex, delta } => Shape::Sector { vertex: *vertex, delta: *delta },
        };
        Contour::new(shape, self.t_max, self.nodes)
    }
}

impl Shape {
    pub fn to_config(&self) -> ShapeConfig {
        match self {
            Shape::Vertical { abscissa } => ShapeConfig::Vertical { abscissa: *abscissa },
            Shape::ExpRegion { a, b } => ShapeConfig::ExpRegion { a: *a, b: *b },
            Shape::GevreyPower { a, b, s } => ShapeConfig::GevreyPower { a: *a, b: *b, s: *s },
            Shape::Ultralog { alpha, beta, l, weights } => ShapeConfig::Ultralog {
                alpha: *alpha,
                beta: *beta,
                l: *l,
                weights: weights.to_config(),
            },
            Shape::OmegaRegion { l, beta, weights } => ShapeConfig::OmegaRegion {
                l: *l,
                beta: *beta,
                weights: weights.to_config(),
            },
            Shape::Sector { vertex, delta } => ShapeConfig::Sector { vertex: *vertex, delta: *delta },
        }
    }

    /// Membership in the closed region bounded on the left by the contour.
    pub fn contains(&self, z: C) -> bool {
        match self {
            Shape::Vertical { abscissa } => z.re >= *abscissa,
            Shape::ExpRegion { a, b } => z.re >= *b && z.im.abs() <= (a * z.re).exp(),
            Shape::GevreyPower { a, b, s } => z.re >= a * z.im.abs().powf(1.0 / s) + b,
            Shape::Ultralog { alpha, beta, l, weights } => {
                z.re >= alpha * weights.associated_with_index(l * z.im.abs()).0 + beta
            }
            Shape::OmegaRegion { l, beta, weights } => {
                z.re >= weights.associated_with_index(l * z.norm()).0 + beta
            }
            Shape::Sector { vertex, delta } => {
                (z - vertex).arg().abs() <= FRAC_PI_2 + delta || z == C::new(*vertex, 0.0)
            }
        }
    }

    /// Relative residual of the defining boundary equation at λ.
    pub fn boundary_residual(&self, z: C) -> f64 {
        let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / rhs.abs().max(1.0);
        match self {
            Shape::Vertical { abscissa } => rel(z.re, *abscissa),
            Shape::ExpRegion { a, b } => {
                let yc = (a * b).exp();
                if z.im.abs() <= yc * (1.0 + 1e-14) {
                    rel(z.re, *b)
                } else {
                    rel(z.im.abs(), (a * z.re).exp())
                }
            }
            Shape::GevreyPower { a, b, s } => rel(z.re, a * z.im.abs().powf(1.0 / s) + b),
            Shape::Ultralog { alpha, beta, l, weights } => {
                rel(z.re, alpha * weights.associated_with_index(l * z.im.abs()).0 + beta)
            }
            Shape::OmegaRegion { l, beta, weights } => {
                rel(z.re, weights.associated_with_index(l * z.norm()).0 + beta)
            }
            Shape::Sector { vertex, delta } => {
                let w = z - vertex;
                if w.norm() == 0.0 {
                    0.0
                } else {
                    (w.arg().abs() - (FRAC_PI_2 + delta)).abs()
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::Vertical { abscissa } => *abscissa > 0.0,
            Shape::ExpRegion { a, b } => *a > 0.0 && *b > 0.0,
            Shape::GevreyPower { a, b, s } => *a > 0.0 && *b > 0.0 && *s > 1.0,
            Shape::Ultralog { alpha, beta, l, weights } => {
                *alpha > 0.0 && *beta > 0.0 && *l >= 1.0 && weights.quotients_nondecreasing()
            }
            Shape::OmegaRegion { l, beta, weights } => {
                *beta > 0.0 && *l >= 1.0 && weights.quotients_nondecreasing()
            }
            Shape::Sector { vertex, delta } => *vertex > 0.0 && *delta >= 0.0 && *delta < FRAC_PI_2,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("contour parameters out of range: {:?}", self.to_config()))
        }
    }
}

/// A smooth piece of the path: τ ∈ [u0, u1] ↦ (λ, dλ/dτ).
struct Piece<'a> {
    u0: f64,
    u1: f64,
    arm: Arm,
    /// Geometric refinement toward u0 (Some(true)) or u1 (Some(false)).
    grade_toward_start: Option<bool>,
    map: Rc<dyn Fn(f64) -> Result<(C, C)> + 'a>,
}

#[derive(Debug, Clone)]
pub struct Contour {
    shape: Shape,
    t_max: f64,
    requested: usize,
    nodes: Vec<Node>,
    tail_lower: std::ops::Range<usize>,
    tail_upper: std::ops::Range<usize>,
}

/// Outcome of a scalar contour integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: C,
    pub tail_estimate: f64,
    pub quad_error: f64,
    /// max(|f(first node)|, |f(last node)|) / max_j |f(λ_j)|.
    pub end_ratio: f64,
    pub peak: f64,
    pub nodes: usize,
}

/// Outcome of a vector-valued contour integral (norms are ∞-norms).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralVec {
    pub value: Vec<C>,
    pub tail_estimate: f64,
    pub quad_error: f64,
    pub end_ratio: f64,
    pub peak: f64,
    pub nodes: usize,
}

const GRADE_LEVELS: usize = 12;
const RAMP_H0: f64 = 0.5;
const RAMP_RATIO: f64 = 1.2;

fn legendre_rows() -> &'static [[f64; PANEL]; 2] {
    static R: OnceLock<[[f64; PANEL]; 2]> = OnceLock::new();
    R.get_or_init(|| {
        let mut out = [[0.0; PANEL]; 2];
        for (i, &x) in gl16().nodes.iter().enumerate() {
            let p = legendre_values(15, x);
            out[0][i] = 14.5 * p[14];
            out[1][i] = 15.5 * p[15];
        }
        out
    })
}

impl Contour {
    pub fn vertical_line(abscissa: f64, t_max: f64, n: usize) -> Result<Self> {
        Self::new(Shape::Vertical { abscissa }, t_max, n)
    }

    pub fn exp_region(a: f64, b: f64, t_max: f64, n: usize) -> Result<Self> {
        Self::new(Shape::ExpRegion { a, b }, t_max, n)
    }

    pub fn gevrey_power(a: f64, b: f64, s: f64, t_max: f64, n: usize) -> Result<Self> {
        Self::new(Shape::GevreyPower { a, b, s }, t_max, n)
    }

    pub fn ultralog(
        alpha: f64,
        beta: f64,
        l: f64,
        weights: &WeightSequence,
        t_max: f64,
        n: usize,
    ) -> Result<Self> {
        Self::new(Shape::Ultralog { alpha, beta, l, weights: weights.clone() }, t_max, n)
    }

    pub fn omega_region(l: f64, beta: f64, weights: &WeightSequence, t_max: f64, n: usize) -> Result<Self> {
        Self::new(Shape::OmegaRegion { l, beta, weights: weights.clone() }, t_max, n)
    }

    pub fn sector(vertex: f64, delta: f64, t_max: f64, n: usize) -> Result<Self> {
        Self::new(Shape::Sector { vertex, delta }, t_max, n)
    }

    pub fn new(shape: Shape, t_max: f64, n: usize) -> Result<Self> {
        shape.validate()?;
        if n < PANEL {
            return invalid(format!("node count N = {n} must be at least {PANEL}"));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return invalid(format!("truncation T = {t_max} must be positive"));
        }
        let nodes = {
        let pieces = build_pieces(&shape, t_max)?;
        let total_panels = (n / PANEL).max(1);
        let len_total: f64 = pieces.iter().map(|p| p.u1 - p.u0).sum();
        let mut nodes = Vec::new();
        let gl = gl16();
        for piece in &pieces {
            let len = piece.u1 - piece.u0;
            if len <= 0.0 {
                continue;
            }
            let share = ((total_panels as f64) * len / len_total).round().max(1.0) as usize;
            let mut edges = Vec::new();
            match piece.grade_toward_start {
                None => {
                    // fine panels at the end nearer the origin, widening geometrically
                    let near_start = piece.u0.abs() <= piece.u1.abs();
                    for d in ramp_edges(len, share) {
                        edges.push(if near_start { piece.u0 + d } else { piece.u1 - d });
                    }
                    if !near_start {
                        edges.reverse();
                    }
                }
                Some(toward_start) => {
                    // geometric panels inside the first half-panel, uniform beyond
                    let h = len / share as f64;
                    let mut local = vec![0.0];
                    for g in (0..GRADE_LEVELS).rev() {
                        local.push(h * 0.5f64.powi(g as i32 + 1));
                    }
                    for k in 1..=share {
                        local.push(h * k as f64);
                    }
                    for d in local {
                        edges.push(if toward_start { piece.u0 + d } else { piece.u1 - d });
                    }
                    if !toward_start {
                        edges.reverse();
                    }
                }
            }
            *edges.last_mut().unwrap() = piece.u1;
            edges[0] = piece.u0;
            for e in edges.windows(2) {
                let (a, b) = (e[0], e[1]);
                if b <= a {
                    continue;
                }
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                    let (lambda, d) = (piece.map)(c + h * x)?;
                    nodes.push(Node { lambda, weight: d * (h * w), arm: piece.arm });
                }
            }
        }
            nodes
        };
        let count = |arm: Arm| nodes.iter().filter(|n| n.arm == arm).count();
        let lower = count(Arm::Lower);
        let upper = count(Arm::Upper);
        let k_lower = ((lower as f64) * 0.05).ceil() as usize;
        let k_upper = ((upper as f64) * 0.05).ceil() as usize;
        let len = nodes.len();
        Ok(Self {
            shape,
            t_max,
            requested: n,
            nodes,
            tail_lower: 0..k_lower,
            tail_upper: len - k_upper..len,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn requested_nodes(&self) -> usize {
        self.requested
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ|w_j|, the discrete arc length.
    pub fn length(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight.norm()).sum()
    }

    pub fn contains(&self, z: C) -> bool {
        self.shape.contains(z)
    }

    pub fn config(&self) -> ContourConfig {
        ContourConfig { shape: self.shape.to_config(), t_max: self.t_max, nodes: self.requested }
    }

    /// Same nodes traversed downwards (weights negated).
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.weight = -n.weight;
        }
        out
    }

    /// Same shape, twice the node budget.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.shape.clone(), self.t_max, 2 * self.requested)
    }

    pub fn integrate<F>(&self, f: F) -> Result<Integral>
    where
        F: Fn(C) -> C + Sync,
    {
        self.integrate_indexed(|_, z| Ok(f(z)))
    }

    /// Scalar integral with a fallible, node-aware integrand.
    pub fn integrate_indexed<F>(&self, f: F) -> Result<Integral>
    where
        F: Fn(usize, C) -> Result<C> + Sync,
    {
        let res = self.integrate_vec(1, |j, z| Ok(vec![f(j, z)?]))?;
        Ok(Integral {
            value: res.value[0],
            tail_estimate: res.tail_estimate,
            quad_error: res.quad_error,
            end_ratio: res.end_ratio,
            peak: res.peak,
            nodes: res.nodes,
        })
    }

    /// Vector-valued integral Σ_j w_j f(λ_j) summed panel by panel in a fixed order.
    pub fn integrate_vec<F>(&self, dim: usize, f: F) -> Result<IntegralVec>
    where
        F: Fn(usize, C) -> Result<Vec<C>> + Sync,
    {
        let rows = legendre_rows();
        let n_panels = self.nodes.len() / PANEL;
        struct PanelOut {
            sum: Vec<C>,
            err: f64,
            peak: f64,
            first: f64,
            last: f64,
            lower_tail: Vec<C>,
            upper_tail: Vec<C>,
        }
        let outs: Vec<Result<PanelOut>> = (0..n_panels)
            .into_par_iter()
            .map(|k| {
                let mut terms: Vec<Vec<C>> = Vec::with_capacity(PANEL);
                let mut peak = 0.0f64;
                let mut first = 0.0;
                let mut last = 0.0;
                let zero = vec![C::new(0.0, 0.0); dim];
                let mut lower_tail = zero.clone();
                let mut upper_tail = zero.clone();
                for i in 0..PANEL {
                    let j = k * PANEL + i;
                    let node = self.nodes[j];
                    let v = f(j, node.lambda)?;
                    if v.len() != dim {
                        return invalid(format!("integrand returned {} values, expected {dim}", v.len()));
                    }
                    let mag = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
                    if v.iter().any(|z| !z.is_finite()) {
                        return Err(Error::NonFinite { index: j, lambda: node.lambda });
                    }
                    peak = peak.max(mag);
                    if j == 0 {
                        first = mag;
                    }
                    if j + 1 == self.nodes.len() {
                        last = mag;
                    }
                    let t: Vec<C> = v.iter().map(|z| z * node.weight).collect();
                    if self.tail_lower.contains(&j) {
                        add_into(&mut lower_tail, &t);
                    }
                    if self.tail_upper.contains(&j) {
                        add_into(&mut upper_tail, &t);
                    }
                    terms.push(t);
                }
                let mut sum = zero.clone();
                let mut c14 = zero.clone();
                let mut c15 = zero;
                for (i, t) in terms.iter().enumerate() {
                    for d in 0..dim {
                        sum[d] += t[d];
                        c14[d] += t[d] * rows[0][i];
                        c15[d] += t[d] * rows[1][i];
                    }
                }
                let err = (0..dim).fold(0.0f64, |m, d| m.max(c14[d].norm() + c15[d].norm()));
                Ok(PanelOut { sum, err, peak, first, last, lower_tail, upper_tail })
            })
            .collect();
        let mut sums = Vec::with_capacity(n_panels);
        let mut err = Vec::with_capacity(n_panels);
        let mut peak = 0.0f64;
        let mut first = 0.0;
        let mut last = 0.0;
        let mut lower = vec![C::new(0.0, 0.0); dim];
        let mut upper = vec![C::new(0.0, 0.0); dim];
        for o in outs {
            let o = o?;
            peak = peak.max(o.peak);
            if o.first > 0.0 {
                first = o.first;
            }
            if o.last > 0.0 {
                last = o.last;
            }
            add_into(&mut lower, &o.lower_tail);
            add_into(&mut upper, &o.upper_tail);
            err.push(C::new(o.err, 0.0));
            sums.push(o.sum);
        }
        let value = pairwise_sum_vec(&sums, dim);
        let inf = |v: &[C]| v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        Ok(IntegralVec {
            value,
            tail_estimate: inf(&lower) + inf(&upper),
            quad_error: pairwise_sum(&err).re,
            end_ratio: if peak > 0.0 { first.max(last) / peak } else { 0.0 },
            peak,
            nodes: self.nodes.len(),
        })
    }
}

/// Panel edges on [0, len]: widths start at min(RAMP_H0, len/share) and grow by
/// RAMP_RATIO up to the uniform width len/share.
fn ramp_edges(len: f64, share: usize) -> Vec<f64> {
    let big = len / share as f64;
    let mut w = RAMP_H0.min(big);
    let mut out = vec![0.0];
    let mut d = 0.0;
    while d < len {
        d = (d + w).min(len);
        if len - d < 0.25 * w.min(big) {
            d = len;
        }
        out.push(d);
        w = (w * RAMP_RATIO).min(big);
    }
    out
}

fn add_into(acc: &mut [C], v: &[C]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn build_pieces(shape: &Shape, t: f64) -> Result<Vec<Piece<'_>>> {
    let i = C::new(0.0, 1.0);
    let mut pieces: Vec<Piece> = Vec::new();
    match shape {
        &Shape::Vertical { abscissa } => {
            let map = move |y: f64| Ok((C::new(abscissa, y), i));
            pieces.push(Piece { u0: -t, u1: 0.0, arm: Arm::Lower, grade_toward_start: None, map: Rc::new(map) });
            pieces.push(Piece { u0: 0.0, u1: t, arm: Arm::Upper, grade_toward_start: None, map: Rc::new(map) });
        }
        &Shape::ExpRegion { a, b } => {
            let yc = (a * b).exp();
            if t <= yc {
                return invalid(format!("T = {t} must exceed the corner height e^(ab) = {yc}"));
            }
            let arm = move |y: f64| Ok((C::new(y.abs().ln() / a, y), C::new(1.0 / (a * y), 1.0)));
            pieces.push(Piece { u0: -t, u1: -yc, arm: Arm::Lower, grade_toward_start: None, map: Rc::new(arm) });
            pieces.push(Piece {
                u0: -yc,
                u1: yc,
                arm: Arm::Middle,
                grade_toward_start: None,
                map: Rc::new(move |y: f64| Ok((C::new(b, y), i))),
            });
            pieces.push(Piece { u0: yc, u1: t, arm: Arm::Upper, grade_toward_start: None, map: Rc::new(arm) });
        }
        &Shape::GevreyPower { a, b, s } => {
            if t <= 1.0 {
                return invalid("T must exceed 1 for the gevrey_power contour");
            }
            let outer = move |y: f64| {
                let ay = y.abs();
                let re = a * ay.powf(1.0 / s) + b;
                let d = y.signum() * (a / s) * ay.powf(1.0 / s - 1.0);
                Ok((C::new(re, y), C::new(d, 1.0)))
            };
            // near the cusp: y = sign(u)|u|^s
            let inner = move |u: f64| {
                let au = u.abs();
                let y = u.signum() * au.powf(s);
                Ok((C::new(a * au + b, y), C::new(a * u.signum(), s * au.powf(s - 1.0))))
            };
            let grade = if (s - s.round()).abs() < 1e-12 { None } else { Some(true) };
            pieces.push(Piece { u0: -t, u1: -1.0, arm: Arm::Lower, grade_toward_start: None, map: Rc::new(outer) });
            pieces.push(Piece {
                u0: -1.0,
                u1: 0.0,
                arm: Arm::Middle,
                grade_toward_start: grade.map(|_| false),
                map: Rc::new(inner),
            });
            pieces.push(Piece { u0: 0.0, u1: 1.0, arm: Arm::Middle, grade_toward_start: grade, map: Rc::new(inner) });
            pieces.push(Piece { u0: 1.0, u1: t, arm: Arm::Upper, grade_toward_start: None, map: Rc::new(outer) });
        }
        Shape::Ultralog { alpha, beta, l, weights } => {
            let (alpha, beta, l) = (*alpha, *beta, *l);
            let mut breaks = vec![0.0];
            for p in 1..=weights.p_max() {
                let y = weights.quotient(p) / l;
                if y >= t {
                    break;
                }
                if y > *breaks.last().unwrap() {
                    breaks.push(y);
                }
            }
            if weights.saturated(l * t) {
                return invalid("associated function saturates at P_max inside the truncation T");
            }
            breaks.push(t);
            let mut upper: Vec<Piece> = Vec::new();
            for w in breaks.windows(2) {
                let (y0, y1) = (w[0], w[1]);
                let p = weights.associated_with_index(l * 0.5 * (y0 + y1)).1;
                let lnm = weights.ln_m(p);
                let map = move |y: f64| {
                    let ay = y.abs();
                    if p == 0 {
                        return Ok((C::new(beta, y), i));
                    }
                    let re = alpha * (p as f64 * (l * ay).ln() - lnm) + beta;
                    Ok((C::new(re, y), C::new(alpha * p as f64 / y, 1.0)))
                };
                let arm = if p == 0 { Arm::Middle } else { Arm::Upper };
                upper.push(Piece { u0: y0, u1: y1, arm, grade_toward_start: None, map: Rc::new(map) });
            }
            mirror_and_push(&mut pieces, upper);
        }
        Shape::OmegaRegion { l, beta, weights } => {
            let (l, beta) = (*l, *beta);
            let r0 = omega_root(weights, l, beta, 0.0)?;
            let mut breaks = vec![0.0];
            for p in 1..=weights.p_max() {
                let rho = weights.quotient(p) / l;
                if rho <= r0 {
                    continue;
                }
                let re_p = weights.associated_with_index(weights.quotient(p)).0 + beta;
                let y2 = rho * rho - re_p * re_p;
                if y2 <= 0.0 {
                    continue;
                }
                let y = y2.sqrt();
                if y >= t {
                    break;
                }
                if y > *breaks.last().unwrap() {
                    breaks.push(y);
                }
            }
            if weights.saturated(l * 2.0 * t) {
                return invalid("associated function saturates at P_max inside the truncation T");
            }
            breaks.push(t);
            let mut upper: Vec<Piece> = Vec::new();
            for (k, w) in breaks.windows(2).enumerate() {
                let (y0, y1) = (w[0], w[1]);
                let ws = weights;
                let map = move |y: f64| {
                    let r = omega_root(ws, l, beta, y)?;
                    let z = C::new(r, y);
                    let p = ws.associated_with_index(l * z.norm()).1 as f64;
                    let d = if p == 0.0 { 0.0 } else { p * y / (z.norm_sqr() - p * r) };
                    Ok((z, C::new(d, 1.0)))
                };
                let arm = if k == 0 { Arm::Middle } else { Arm::Upper };
                upper.push(Piece { u0: y0, u1: y1, arm, grade_toward_start: None, map: Rc::new(map) });
            }
            mirror_and_push(&mut pieces, upper);
        }
        &Shape::Sector { vertex, delta } => {
            let up = C::from_polar(1.0, FRAC_PI_2 + delta);
            let down = C::from_polar(1.0, -(FRAC_PI_2 + delta));
            pieces.push(Piece {
                u0: -t,
                u1: 0.0,
                arm: Arm::Lower,
                grade_toward_start: None,
                map: Rc::new(move |u: f64| Ok((vertex + down * (-u), -down))),
            });
            pieces.push(Piece {
                u0: 0.0,
                u1: t,
                arm: Arm::Upper,
                grade_toward_start: None,
                map: Rc::new(move |u: f64| Ok((vertex + up * u, up))),
            });
        }
    }
    Ok(pieces)
}

/// Given pieces on y ≥ 0, prepend their mirror images: λ(u) = conj(λ_upper(-u)).
fn mirror_and_push<'a>(out: &mut Vec<Piece<'a>>, upper: Vec<Piece<'a>>) {
    for p in upper.iter().rev() {
        let map = Rc::clone(&p.map);
        out.push(Piece {
            u0: -p.u1,
            u1: -p.u0,
            arm: if p.arm == Arm::Upper { Arm::Lower } else { Arm::Middle },
            grade_toward_start: p.grade_toward_start.map(|b| !b),
            map: Rc::new(move |u: f64| {
                let (z, d) = map(-u)?;
                Ok((z.conj(), -d.conj()))
            }),
        });
    }
    out.extend(upper);
}

/// Solve r = M(l·|r + iy|) + β for r by bisection followed by Newton polishing.
fn omega_root(w: &WeightSequence, l: f64, beta: f64, y: f64) -> Result<f64> {
    let g = |r: f64| r - w.associated_with_index(l * r.hypot(y)).0 - beta;
    let mut lo = beta;
    if g(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * beta + 1.0;
    let mut k = 0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        k += 1;
        if k > 200 {
            return Err(Error::RootFinding { im: y });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    let res = g(r).abs() / r.max(1.0);
    if res > 1e-10 || !r.is_finite() {
        return Err(Error::RootFinding { im: y });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gevrey2() -> WeightSequence {
        WeightSequence::gevrey(2.0, 256).unwrap()
    }

    fn all_shapes() -> Vec<Contour> {
        let w = gevrey2();
        vec![
            Contour::vertical_line(1.0, 50.0, 800).unwrap(),
            Contour::exp_region(1.0, 1.0, 200.0, 800).unwrap(),
            Contour::gevrey_power(1.0, 2.0, 2.0, 400.0, 800).unwrap(),
            Contour::gevrey_power(1.0, 2.0, 2.5, 400.0, 800).unwrap(),
            Contour::ultralog(1.0, 0.5, 1.0, &w, 400.0, 800).unwrap(),
            Contour::omega_region(1.0, 1.0, &w, 400.0, 800).unwrap(),
            Contour::sector(0.5, 0.7, 60.0, 800).unwrap(),
        ]
    }

    #[test]
    fn reciprocal_powers_on_vertical_line() {
        let c = Contour::vertical_line(1.0, 50.0, 2000).unwrap();
        let i1 = c.integrate(|z| 1.0 / z).unwrap();
        assert!((i1.value - C::new(0.0, 2.0 * 50f64.atan())).norm() < 1e-12);
        assert!((i1.value.im - 3.1016).abs() < 1e-4);
        let i2 = c.integrate(|z| 1.0 / (z * z)).unwrap();
        assert!((i2.value - C::new(0.0, 100.0 / 2501.0)).norm() < 1e-13);
    }

    #[test]
    fn inverse_laplace_of_reciprocal_square() {
        let c = Contour::vertical_line(1.0, 4000.0, 24000).unwrap();
        let r = c.integrate(|z| z.exp() / (z * z)).unwrap();
        let v = r.value / C::new(0.0, 2.0 * PI);
        assert!((v - 1.0).norm() < 1e-6, "{v}");
    }

    #[test]
    fn zero_integrand() {
        let c = Contour::vertical_line(1.0, 10.0, 64).unwrap();
        let r = c.integrate(|_| C::new(0.0, 0.0)).unwrap();
        assert_eq!((r.value, r.tail_estimate), (C::new(0.0, 0.0), 0.0));
    }

    #[test]
    fn non_finite_aborts_with_index() {
        let c = Contour::vertical_line(1.0, 10.0, 64).unwrap();
        let err = c.integrate(|z| if z.im > 5.0 { C::new(f64::NAN, 0.0) } else { z }).unwrap_err();
        match err {
            Error::NonFinite { index, lambda } => {
                assert!(lambda.im > 5.0);
                assert_eq!(c.nodes()[index].lambda, lambda);
                assert!(c.nodes()[..index].iter().all(|n| n.lambda.im <= 5.0));
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn orientation_and_membership() {
        for c in all_shapes() {
            let nodes = c.nodes();
            assert!(nodes.len() >= 800, "{:?}", c.config());
            assert!(nodes.windows(2).all(|w| w[1].lambda.im >= w[0].lambda.im));
            assert!(nodes[0].lambda.im < nodes[nodes.len() - 1].lambda.im);
            for n in nodes {
                let r = c.shape().boundary_residual(n.lambda);
                assert!(r <= 1e-10, "{:?} {} {r}", c.config().shape, n.lambda);
            }
            // weights point along the direction of travel
            assert!(nodes.iter().all(|n| n.weight.im >= 0.0));
        }
    }

    #[test]
    fn exp_region_membership() {
        let s = Shape::ExpRegion { a: 1.0, b: 1.0 };
        assert!(s.contains(C::new(1.0, 0.0)));
        assert!(s.contains(C::new(1.0, 2.0)));
        assert!(!s.contains(C::new(1.0, 3.0)));
        let c = Contour::exp_region(1.0, 1.0, 100.0, 400).unwrap();
        let left = c.nodes().iter().map(|n| n.lambda.re).fold(f64::INFINITY, f64::min);
        assert_eq!(left, 1.0);
    }

    #[test]
    fn gevrey_power_points() {
        let s = Shape::GevreyPower { a: 1.0, b: 2.0, s: 2.0 };
        assert_eq!(s.boundary_residual(C::new(3.0, 1.0)), 0.0);
        assert_eq!(s.boundary_residual(C::new(4.0, 4.0)), 0.0);
        let s3 = Shape::GevreyPower { a: 0.5, b: 2.0, s: 3.0 };
        assert!(s3.boundary_residual(C::new(2.5, 1.0)) < 1e-15);
        assert!(s3.boundary_residual(C::new(3.0, 8.0)) < 1e-15);
    }

    #[test]
    fn ultralog_flat_part_and_growth() {
        let w = gevrey2();
        let c = Contour::ultralog(1.0, 0.5, 1.0, &w, 2e4, 3200).unwrap();
        for n in c.nodes() {
            if n.lambda.im.abs() <= 1.0 {
                assert_eq!(n.lambda.re, 0.5);
            }
        }
        let re = |y: f64| w.associated_with_index(y).0;
        let ratio = re(1e4) / re(1e2);
        // M(1e4) = 193.55, M(1e2) = 15.84
        assert!((8.0..12.5).contains(&ratio), "{ratio}");
        assert!((ratio - 12.22).abs() < 0.01);
    }

    #[test]
    fn omega_root_on_real_axis() {
        let w = gevrey2();
        let r = omega_root(&w, 1.0, 1.0, 0.0).unwrap();
        // independent bisection oracle on the sup definition
        let g = |x: f64| {
            let m = (0..=256).map(|p| p as f64 * x.ln() - w.ln_m(p)).fold(0.0, f64::max);
            x - m - 1.0
        };
        let (mut lo, mut hi) = (1.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        // M(1) = 0, so the root sits at Re = β exactly
        assert_eq!(r, 1.0);
        assert!((r - lo).abs() < 1e-12, "{r} {lo}");
        let r2 = omega_root(&w, 1.0, 2.0, 0.0).unwrap();
        // on [1, 4] the equation reads r = ln r + 2
        assert!((r2 - r2.ln() - 2.0).abs() < 1e-12 && r2 > 3.0 && r2 < 4.0, "{r2}");
    }

    #[test]
    fn omega_region_lies_right_of_ultralog() {
        let w = gevrey2();
        let om = Contour::omega_region(1.0, 1.0, &w, 500.0, 800).unwrap();
        let ul = Shape::Ultralog { alpha: 1.0, beta: 1.0, l: 1.0, weights: w.clone() };
        for n in om.nodes() {
            assert!(ul.contains(n.lambda));
        }
    }

    #[test]
    fn refinement_within_error_estimate() {
        let f = |z: C| (-z).exp() / (1.0 + z * z);
        let w = gevrey2();
        for c in [
            Contour::gevrey_power(1.0, 2.0, 2.0, 2000.0, 512).unwrap(),
            Contour::ultralog(1.0, 0.5, 1.0, &w, 1e4, 512).unwrap(),
        ] {
            let mut prev: Option<f64> = None;
            let mut cur = c;
            let mut vals = vec![];
            for _ in 0..4 {
                let a = cur.integrate(f).unwrap();
                let fine = cur.refined().unwrap();
                let b = fine.integrate(f).unwrap();
                let d = (a.value - b.value).norm();
                assert!(d <= a.quad_error.max(1e-15), "{d} {}", a.quad_error);
                if let Some(p) = prev {
                    assert!(d <= 4.0 * p + 1e-15, "{d} {p}");
                }
                prev = Some(d);
                vals.push(d);
                cur = fine;
            }
            assert!(vals[3] < 1e-8, "{vals:?}");
        }
    }

    #[test]
    fn deformation_between_line_and_omega_boundary() {
        let f = |z: C| 1.0 / ((z + 1.0) * (z - C::new(0.2, 3.0)) * (z - C::new(-2.0, -1.0)));
        let w = gevrey2();
        let v = Contour::vertical_line(1.5, 2e4, 32000).unwrap().integrate(f).unwrap();
        let o = Contour::omega_region(1.0, 1.0, &w, 2e4, 32000).unwrap().integrate(f).unwrap();
        // closing to the right encloses no pole: both values vanish
        assert!(v.value.norm() < 1e-9 && o.value.norm() < 1e-9, "{} {}", v.value, o.value);
    }

    #[test]
    fn tail_estimate_tracks_truncation() {
        let f = |z: C| 1.0 / (z * z * z);
        let short = Contour::vertical_line(1.0, 100.0, 1600).unwrap().integrate(f).unwrap();
        let long = Contour::vertical_line(1.0, 1000.0, 16000).unwrap().integrate(f).unwrap();
        let d = (short.value - long.value).norm();
        assert!(d <= 10.0 * short.tail_estimate, "{d} {}", short.tail_estimate);
    }

    #[test]
    fn config_round_trip() {
        for c in all_shapes() {
            let js = serde_json::to_string(&c.config()).unwrap();
            let back: ContourConfig = serde_json::from_str(&js).unwrap();
            let c2 = back.build().unwrap();
            assert_eq!(c.nodes(), c2.nodes());
        }
        let bad = r#"{"shape":{"kind":"vertical","abscissa":1.0,"x":2},"T":1,"N":16}"#;
        assert!(serde_json::from_str::<ContourConfig>(bad).is_err());
    }

    #[test]
    fn reversed_negates_integral() {
        let c = Contour::sector(0.5, 0.5, 40.0, 640).unwrap();
        let f = |z: C| (0.3 * z).exp() / (z * z + 1.0);
        let a = c.integrate(f).unwrap().value;
        let b = c.reversed().integrate(f).unwrap().value;
        assert_eq!(a, -b);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn gevrey_power_nodes_on_boundary(a in 0.2f64..3.0, b in 1.1f64..4.0, s in 1.2f64..4.0) {
                let c = Contour::gevrey_power(a, b, s, 300.0, 320).unwrap();
                for n in c.nodes() {
                    prop_assert!(c.shape().boundary_residual(n.lambda) <= 1e-10);
                }
                prop_assert!(c.nodes().windows(2).all(|w| w[1].lambda.im >= w[0].lambda.im));
            }

            #[test]
            fn exp_region_nodes_on_boundary(a in 0.2f64..2.0, b in 0.1f64..2.0) {
                let t = 2.0 * (a * b).exp() + 10.0;
                let c = Contour::exp_region(a, b, t, 320).unwrap();
                for n in c.nodes() {
                    prop_assert!(c.shape().boundary_residual(n.lambda) <= 1e-10);
                }
                prop_assert!(c.nodes().windows(2).all(|w| w[1].lambda.im >= w[0].lambda.im));
            }

            #[test]
            fn ultralog_nodes_on_boundary(alpha in 0.2f64..2.0, beta in 0.1f64..2.0, l in 1.0f64..4.0, s in 1.5f64..3.5) {
                let w = WeightSequence::gevrey(s, 256).unwrap();
                let c = Contour::ultralog(alpha, beta, l, &w, 500.0, 320).unwrap();
                for n in c.nodes() {
                    prop_assert!(c.shape().boundary_residual(n.lambda) <= 1e-10);
                }
            }
        }
    }
}
