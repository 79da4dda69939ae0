use crate::config::{build_contour, config_err, rng, ActionKind, RunConfig, TestFunctionSpec};
use crate::output::{Cell, Plot, Sink};
use anyhow::Result;
use num_complex::Complex64 as C;
use regsemi::contour::ShapeConfig;
use regsemi::engine::{self, Normalization, SemigroupAction, DEFAULT_N_TOT};
use regsemi::operators::{Grid, Matrix, Multiplication, OperatorConfig, ResolventOperator, RobinLaplacian};
use regsemi::scenarios::{self, Options, Scenario};
use regsemi::testfn::TestFunction;
use regsemi::verify::{self, CheckReport, ControlOutcome, Tolerances};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::PathBuf;

/// What a command reports back to `main`.
pub enum Status {
    Pass,
    CheckFailed,
}

pub struct Ctx {
    pub cfg: RunConfig,
    /// Directory that relative paths in the config resolve against.
    pub base: PathBuf,
    pub seed: u64,
    pub nodes: Option<usize>,
    pub tol_scale: f64,
    pub sink: Sink,
}

impl Ctx {
    fn tol(&self) -> Tolerances {
        self.sink.tolerances
    }

    fn n_tot(&self) -> u32 {
        self.cfg.n_tot.unwrap_or(DEFAULT_N_TOT)
    }
}

/// Tolerances in force for a run: the verify section overrides the defaults, then the scale applies.
pub fn effective_tolerances(cfg: &RunConfig, tol_scale: f64) -> Tolerances {
    cfg.verify.as_ref().and_then(|v| v.tolerances).unwrap_or_default().scaled(tol_scale)
}

/// Digest over the config and every command-line override.
pub fn run_digest(cfg: &RunConfig, command: &str, seed: u64, nodes: Option<usize>, tol_scale: f64) -> String {
    let cfg_json = serde_json::to_string(cfg).unwrap_or_default();
    verify::digest(&format!("{command}|{cfg_json}|seed={seed}|nodes={nodes:?}|tol_scale={tol_scale}"))
}

fn coords(op: &dyn ResolventOperator) -> Vec<f64> {
    match op.grid() {
        Some(g) => g.points().to_vec(),
        None => (0..op.dim()).map(|k| k as f64).collect(),
    }
}

fn sup(v: &[C]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WeightsSummary {
    weights: regsemi::weights::WeightConfig,
    p_max: usize,
    log_convex_quotients: bool,
    conditions: regsemi::weights::ConditionReport,
}

pub fn weights(ctx: &mut Ctx) -> Result<Status> {
    let w = ctx.cfg.weights()?;
    let rows: Vec<Vec<Cell>> = (0..=w.p_max())
        .map(|p| {
            let q = if p == 0 { Cell::Text(String::new()) } else { w.quotient(p).into() };
            vec![p.into(), w.ln_m(p).into(), w.m(p).into(), q]
        })
        .collect();
    ctx.sink.csv("weights.csv", &["p", "ln_M_p", "M_p", "m_p"], &rows)?;

    let rhos: Vec<f64> = (-20..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
    let mut assoc = Vec::new();
    for &rho in &rhos {
        let (m, p) = w.associated_with_index(rho);
        assoc.push(vec![rho.into(), m.into(), p.into(), Cell::Int(w.saturated(rho) as i64)]);
    }
    ctx.sink.csv("associated.csv", &["rho", "M", "argmax_p", "saturated"], &assoc)?;

    let prod = w.canonical_product(w.p_max().min(128))?;
    let mut omega = Vec::new();
    for &rho in &rhos {
        let ln = prod.ln_eval(C::new(rho, 0.0)).re;
        omega.push(vec![rho.into(), ln.into(), w.associated(rho)?.into()]);
    }
    ctx.sink.csv("omega.csv", &["s", "ln_abs_omega", "M"], &omega)?;

    let cond = w.check_conditions();
    ctx.sink.json(
        "weights.json",
        &WeightsSummary { weights: w.to_config(), p_max: w.p_max(), log_convex_quotients: w.quotients_nondecreasing(), conditions: cond },
    )?;
    let lg = |rows: &[Vec<Cell>], col: usize| -> Vec<(f64, f64)> {
        rows.iter()
            .filter_map(|r| match (&r[0], &r[col]) {
                (Cell::Num(x), Cell::Num(y)) => Some((x.log10(), *y)),
                _ => None,
            })
            .collect()
    };
    ctx.sink.svg("weights.svg", &Plot::lines("associated function", "log10 rho", "value").with("M(rho)", lg(&assoc, 1)).with("ln|omega(rho)|", lg(&omega, 1)));
    Ok(Status::Pass)
}

// ---------------------------------------------------------------------------

pub fn contour_dump(ctx: &mut Ctx) -> Result<Status> {
    let contour = ctx.cfg.contour(ctx.nodes)?;
    let rows: Vec<Vec<Cell>> = contour
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let arm = serde_json::to_value(n.arm).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            vec![k.into(), arm.into(), n.lambda.re.into(), n.lambda.im.into(), n.weight.re.into(), n.weight.im.into()]
        })
        .collect();
    ctx.sink.csv("contour.csv", &["index", "arm", "re", "im", "w_re", "w_im"], &rows)?;
    #[derive(Serialize)]
    struct Summary {
        contour: regsemi::contour::ContourConfig,
        nodes: usize,
        length: f64,
    }
    ctx.sink.json("contour.json", &Summary { contour: contour.config(), nodes: contour.len(), length: contour.length() })?;
    let mut plot = Plot::lines("contour nodes", "Re lambda", "Im lambda").with("nodes", contour.nodes().iter().map(|n| (n.lambda.re, n.lambda.im)).collect());
    plot.scatter = true;
    ctx.sink.svg("contour.svg", &plot);
    Ok(Status::Pass)
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ActionSummary {
    kind: ActionKind,
    alpha: Option<f64>,
    tail_estimate: Option<f64>,
    quad_error: Option<f64>,
    end_ratio: Option<f64>,
    nodes: Option<usize>,
    residuals: BTreeMap<String, f64>,
}

pub fn action(ctx: &mut Ctx) -> Result<Status> {
    let Some(sec) = ctx.cfg.action.clone() else { return config_err("missing action section") };
    let (op, matrix) = ctx.cfg.operator(&ctx.base)?;
    let phi = sec.phi.build()?;
    let x = sec.x.build(op.as_ref(), &mut rng(ctx.seed))?;

    let mut summary = ActionSummary { kind: sec.kind, alpha: sec.alpha, tail_estimate: None, quad_error: None, end_ratio: None, nodes: None, residuals: BTreeMap::new() };
    let value = match sec.kind {
        ActionKind::Gd => {
            let contour = ctx.cfg.contour(ctx.nodes)?;
            let sa = SemigroupAction::distribution(op.clone(), contour).with_normalization(sec.normalization);
            let out = sa.gd_action(&phi, &x)?;
            summary.tail_estimate = Some(out.diagnostics.tail_estimate);
            summary.quad_error = Some(out.diagnostics.quad_error);
            summary.end_ratio = Some(out.diagnostics.end_ratio);
            summary.nodes = Some(out.diagnostics.nodes);
            out.value
        }
        ActionKind::Galpha => {
            let Some(m) = &matrix else { return config_err("galpha actions need a matrix operator") };
            let Some(alpha) = sec.alpha else { return config_err("galpha actions need alpha") };
            engine::galpha_action(m, alpha, &phi, &x)?
        }
    };

    let reference = if sec.reference {
        let scale = sec.normalization.factor() / Normalization::InverseLaplace.factor();
        Some(reference_action(ctx, matrix.as_ref(), &phi, &x)?.into_iter().map(|v| v * scale).collect::<Vec<_>>())
    } else {
        None
    };
    if let Some(r) = &reference {
        summary.residuals.insert("reference".into(), verify::relative_residual(&value, r, op.interior()));
    }

    let xs = coords(op.as_ref());
    let mut cols = vec!["index", "coord", "re", "im"];
    if reference.is_some() {
        cols.extend(["ref_re", "ref_im", "abs_err"]);
    }
    let rows: Vec<Vec<Cell>> = (0..value.len())
        .map(|k| {
            let mut r = vec![k.into(), xs[k].into(), value[k].re.into(), value[k].im.into()];
            if let Some(rf) = &reference {
                r.extend([rf[k].re.into(), rf[k].im.into(), (value[k] - rf[k]).norm().into()]);
            }
            r
        })
        .collect();
    ctx.sink.csv("action.csv", &cols, &rows)?;
    ctx.sink.json("action.json", &summary)?;
    let mut plot = Plot::lines("action", "coordinate", "value").with("re", xs.iter().zip(&value).map(|(a, v)| (*a, v.re)).collect()).with("im", xs.iter().zip(&value).map(|(a, v)| (*a, v.im)).collect());
    if let Some(rf) = &reference {
        plot = plot.with("reference re", xs.iter().zip(rf).map(|(a, v)| (*a, v.re)).collect());
    }
    ctx.sink.svg("action.svg", &plot);
    Ok(Status::Pass)
}

/// ∫φ(t)S(t)x dt computed without the contour: matrix exponentials, or a closed form on grid operators.
fn reference_action(ctx: &Ctx, matrix: Option<&Matrix>, phi: &TestFunction, x: &[C]) -> Result<Vec<C>> {
    if let Some(m) = matrix {
        return Ok(engine::classical_action(m, phi, x));
    }
    match &ctx.cfg.operator {
        Some(OperatorConfig::Multiplication { grid }) => {
            let op = Multiplication::new(Grid::uniform(grid.n, grid.x_max)?)?;
            // The closed form carries a 1/(2π) that the semigroup integral does not.
            Ok(engine::closed_form_mult(&op, phi, x)?.into_iter().map(|v| v * TAU).collect())
        }
        Some(OperatorConfig::RobinLaplacian { grid, c0, beta, r, theta }) => {
            let op = RobinLaplacian::new(Grid::uniform(grid.n, grid.x_max)?, *c0, *beta, *r, *theta)?;
            let Some(c) = &ctx.cfg.contour else { return config_err("missing contour section") };
            let ShapeConfig::Vertical { abscissa } = c.shape else {
                return config_err("the Robin reference needs a vertical contour");
            };
            Ok(engine::closed_form_robin_kernel(&op, phi, x, abscissa, c.t_max, ctx.nodes.unwrap_or(c.nodes))?)
        }
        _ => config_err("no reference available for this operator"),
    }
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SemigroupSummary {
    n_tot: u32,
    times: Vec<f64>,
    sup_norms: Vec<f64>,
    sigma_min: Option<f64>,
    sigma_max: Option<f64>,
    regularizer_warning: Option<String>,
    reports: Vec<CheckReport>,
    pass: bool,
}

/// Dense C_τ is formed column by column; beyond this size it is skipped.
const REGULARIZER_MAX_DIM: usize = 256;

pub fn semigroup(ctx: &mut Ctx) -> Result<Status> {
    let Some(sec) = ctx.cfg.trajectory.clone() else { return config_err("missing trajectory section") };
    if sec.times.is_empty() {
        return config_err("trajectory needs at least one time");
    }
    let (op, _) = ctx.cfg.operator(&ctx.base)?;
    let w = ctx.cfg.weights()?;
    let contour = ctx.cfg.contour(ctx.nodes)?;
    let sa = SemigroupAction::pointwise(op.clone(), contour, &w, ctx.n_tot())?;
    let x = sec.x.build(op.as_ref(), &mut rng(ctx.seed))?;
    let tol = ctx.tol();

    let ts: Vec<C> = sec.times.iter().map(|t| C::new(*t, 0.0)).collect();
    let states = sa.mollified_semigroup(&ts, &x)?;
    let xs = coords(op.as_ref());
    let mut cols: Vec<String> = vec!["index".into(), "coord".into()];
    for t in &sec.times {
        cols.push(format!("re@{t}"));
        cols.push(format!("im@{t}"));
    }
    let rows: Vec<Vec<Cell>> = (0..x.len())
        .map(|k| {
            let mut r = vec![k.into(), xs[k].into()];
            for s in &states {
                r.push(s[k].re.into());
                r.push(s[k].im.into());
            }
            r
        })
        .collect();
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    ctx.sink.csv("semigroup.csv", &col_refs, &rows)?;

    let mut pairs = Vec::new();
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i..] {
            pairs.push((*a, *b));
        }
    }
    let law = verify::check_semigroup_law(&sa, &pairs, &x, tol.semigroup_law)?;
    let law_rows: Vec<Vec<Cell>> = pairs.iter().zip(&law.residuals).map(|((a, b), r)| vec![a.re.into(), b.re.into(), (*r).into()]).collect();
    ctx.sink.csv("law.csv", &["t", "s", "residual"], &law_rows)?;

    let p_max = sec.p_max.min(w.p_max() as u32);
    let (table_rep, table) = verify::gevrey_derivative_table(&sa, &w, sec.h, &sec.times, p_max, &x, tol.gevrey_table)?;
    let mut dcols: Vec<String> = vec!["p".into()];
    dcols.extend(sec.times.iter().map(|t| format!("t={t}")));
    let drows: Vec<Vec<Cell>> = table.rows.iter().enumerate().map(|(p, r)| std::iter::once(p.into()).chain(r.iter().map(|v| (*v).into())).collect()).collect();
    let dref: Vec<&str> = dcols.iter().map(String::as_str).collect();
    ctx.sink.csv("derivatives.csv", &dref, &drows)?;

    let mut reports = vec![law, table_rep];
    let (smin, smax, warn) = if op.dim() <= REGULARIZER_MAX_DIM {
        let reg = sa.regularizer()?;
        let crows: Vec<Vec<Cell>> = (0..reg.matrix.nrows()).map(|i| (0..reg.matrix.ncols()).flat_map(|j| [reg.matrix[(i, j)].re.into(), reg.matrix[(i, j)].im.into()]).collect()).collect();
        let ccols: Vec<String> = (0..reg.matrix.ncols()).flat_map(|j| [format!("re{j}"), format!("im{j}")]).collect();
        let cref: Vec<&str> = ccols.iter().map(String::as_str).collect();
        ctx.sink.csv("regularizer.csv", &cref, &crows)?;
        reports.push(verify::check_regularizer(&sa, tol.regularizer)?);
        (Some(reg.sigma_min), Some(reg.sigma_max), reg.warning)
    } else {
        (None, None, Some(format!("regularizer skipped: dimension {} exceeds {REGULARIZER_MAX_DIM}", op.dim())))
    };

    let pass = reports.iter().all(|r| r.pass);
    let summary = SemigroupSummary {
        n_tot: ctx.n_tot(),
        times: sec.times.clone(),
        sup_norms: states.iter().map(|s| sup(s)).collect(),
        sigma_min: smin,
        sigma_max: smax,
        regularizer_warning: warn,
        reports,
        pass,
    };
    ctx.sink.json("semigroup.json", &summary)?;
    let mut plot = Plot::lines("mollified semigroup", "coordinate", "|S(t)x|");
    for (t, s) in sec.times.iter().zip(&states).take(6) {
        plot = plot.with(format!("t={t}"), xs.iter().zip(s).map(|(a, v)| (*a, v.norm())).collect());
    }
    ctx.sink.svg("semigroup.svg", &plot);
    Ok(if pass { Status::Pass } else { Status::CheckFailed })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifySummary {
    reports: Vec<CheckReport>,
    controls: Vec<ControlOutcome>,
    skipped: Vec<String>,
    pass: bool,
}

/// Kernel probes build one dense matrix per test function.
const KERNEL_MAX_DIM: usize = 128;

/// Paley–Wiener probe points: a vertical line plus a stretch of the real axis.
fn pw_lambdas() -> Vec<C> {
    (0..200).map(|k| C::new(0.5, 2.0 * k as f64)).chain((0..20).map(|k| C::new(-2.0 + 0.2 * k as f64, 0.0))).collect()
}

pub fn verify_battery(ctx: &mut Ctx) -> Result<Status> {
    let Some(sec) = ctx.cfg.verify.clone() else { return config_err("missing verify section") };
    if sec.probes.is_empty() {
        return config_err("verify needs at least one probe state");
    }
    if sec.phis.is_empty() {
        return config_err("verify needs at least one test function");
    }
    let tol = ctx.tol();
    let (op, matrix) = ctx.cfg.operator(&ctx.base)?;
    let w = ctx.cfg.weights()?;
    let contour = ctx.cfg.contour(ctx.nodes)?;
    let sa = SemigroupAction::distribution(op.clone(), contour);
    let phis: Vec<TestFunction> = sec.phis.iter().map(TestFunctionSpec::build).collect::<Result<_>>()?;
    let mut r = rng(ctx.seed);
    let probes: Vec<Vec<C>> = sec.probes.iter().map(|p| p.build(op.as_ref(), &mut r)).collect::<Result<_>>()?;

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    if let Some(m) = &matrix {
        for x in &probes {
            reports.push(verify::check_matrix_oracle(&sa, m, &phis, x, tol.matrix_oracle)?);
        }
    } else {
        skipped.push("matrix_oracle: operator is not a matrix".into());
    }
    if phis.len() >= 2 {
        for x in &probes {
            reports.push(verify::check_cs1(&sa, &phis[0], &phis[1], x, tol.cs1)?);
        }
    } else {
        skipped.push("cs1: needs two test functions".into());
    }
    for phi in &phis {
        for x in &probes {
            reports.push(verify::check_generator_identity(&sa, phi, x, tol.generator)?);
            reports.push(verify::check_commutation(&sa, phi, x, tol.commutation)?);
        }
    }
    if phis.len() >= 8 && op.dim() <= KERNEL_MAX_DIM {
        reports.push(verify::kernel_probe(&sa, &phis, tol.kernel)?);
    } else {
        skipped.push(format!("kernel: needs 8 test functions and dimension ≤ {KERNEL_MAX_DIM}"));
    }
    let (qrep, _) = verify::qexp_scan(&sa, &phis[0], &sec.shifts, &probes, 0, tol.qexp_fit)?;
    reports.push(qrep);
    reports.push(verify::paley_wiener_scan(&phis[0], &w, &sec.h_grid, &pw_lambdas(), w.p_max().min(40), tol.paley_wiener)?);

    if let Some(pc) = &sec.pointwise_contour {
        let pcontour = build_contour(pc, ctx.nodes)?;
        let n_tot = ctx.n_tot();
        let ps = SemigroupAction::pointwise(op.clone(), pcontour.clone(), &w, n_tot)?;
        let ts: Vec<C> = sec.times.iter().map(|t| C::new(*t, 0.0)).collect();
        let mut pairs = Vec::new();
        for (i, a) in ts.iter().enumerate() {
            for b in &ts[i..] {
                pairs.push((*a, *b));
            }
        }
        let x = &probes[0];
        reports.push(verify::check_semigroup_law(&ps, &pairs, x, tol.semigroup_law)?);
        reports.push(verify::check_integral_identity(&ps, &sec.times, x, tol.integral_identity)?);
        reports.push(verify::check_derivative_fd(&ps, &sec.times, x, tol.derivative_fd)?);
        reports.push(verify::check_mollifier_vanishing(&w, &pcontour, n_tot, &sec.times, tol.mollifier)?);
        if op.dim() <= REGULARIZER_MAX_DIM {
            reports.push(verify::check_regularizer(&ps, tol.regularizer)?);
        } else {
            skipped.push(format!("regularizer: dimension exceeds {REGULARIZER_MAX_DIM}"));
        }
        let h = sec.h_grid.first().copied().unwrap_or(0.1);
        let (trep, _) = verify::gevrey_derivative_table(&ps, &w, h, &sec.times, (w.p_max() as u32).min(10), x, tol.gevrey_table)?;
        reports.push(trep);
    } else {
        skipped.push("semigroup checks: no pointwise_contour".into());
    }

    let controls = if sec.controls { verify::negative_controls(&tol)? } else { Vec::new() };
    let pass = reports.iter().all(|r| r.pass) && controls.iter().all(|c| c.failed_as_expected);

    let mut rows: Vec<Vec<Cell>> = reports.iter().map(|r| report_row(r, "check", r.pass)).collect();
    rows.extend(controls.iter().map(|c| report_row(&c.report, "control", c.failed_as_expected)));
    ctx.sink.csv("verify.csv", &["kind", "name", "digest", "worst", "tolerance", "ok"], &rows)?;
    ctx.sink.json("verify.json", &VerifySummary { reports, controls, skipped, pass })?;
    Ok(if pass { Status::Pass } else { Status::CheckFailed })
}

fn report_row(r: &CheckReport, kind: &str, ok: bool) -> Vec<Cell> {
    vec![kind.into(), r.name.clone().into(), r.digest.clone().into(), r.worst().into(), r.tolerance.into(), Cell::Int(ok as i64)]
}

// ---------------------------------------------------------------------------

pub const EXAMPLES: [&str; 9] = ["ex32", "ex33", "ex35", "matrix-oracle", "galpha", "weyl", "mollifier-bound", "mollifier-vanishing", "semigroup-battery"];

pub fn example(ctx: &mut Ctx, name: Option<&str>) -> Result<Status> {
    let name = match name.map(String::from).or_else(|| ctx.cfg.example.clone()) {
        Some(n) => n,
        None => return config_err(format!("example name required, one of {}", EXAMPLES.join(", "))),
    };
    let opts = Options { nodes: ctx.nodes, tol: ctx.tol(), tol_scale: ctx.tol_scale, seed: ctx.seed };
    let sc: Scenario = match name.as_str() {
        "ex32" => scenarios::ex32(&opts)?,
        "ex33" => scenarios::ex33(&opts)?,
        "ex35" => scenarios::ex35(&opts)?,
        "matrix-oracle" => scenarios::matrix_oracle(&opts)?,
        "galpha" => scenarios::galpha_independence(&opts)?,
        "weyl" => scenarios::weyl_calculus(&opts)?,
        "mollifier-bound" => scenarios::mollifier_bound()?,
        "mollifier-vanishing" => scenarios::mollifier_vanishing(&opts)?,
        "semigroup-battery" => scenarios::semigroup_battery(&opts)?,
        other => return config_err(format!("unknown example {other:?}, expected one of {}", EXAMPLES.join(", "))),
    };
    for (tname, table) in &sc.tables {
        let cols: Vec<&str> = table.columns.iter().map(String::as_str).collect();
        let rows: Vec<Vec<Cell>> = table.rows.iter().map(|r| r.iter().map(|v| (*v).into()).collect()).collect();
        ctx.sink.csv(&format!("{name}_{tname}.csv"), &cols, &rows)?;
        if table.columns.len() >= 2 {
            let mut plot = Plot::lines(&format!("{name} {tname}"), &table.columns[0], "value");
            for (j, c) in table.columns.iter().enumerate().skip(1).take(6) {
                plot = plot.with(c.clone(), table.rows.iter().map(|r| (r[0], r[j])).collect());
            }
            ctx.sink.svg(&format!("{name}_{tname}.svg"), &plot);
        }
    }
    #[derive(Serialize)]
    struct Out<'a> {
        scenario: &'a Scenario,
        pass: bool,
    }
    ctx.sink.json(&format!("{name}.json"), &Out { scenario: &sc, pass: sc.pass() })?;
    for r in &sc.reports {
        eprintln!("{} {}: worst {:.3e} tol {:.1e}", if r.pass { "ok  " } else { "FAIL" }, r.name, r.worst(), r.tolerance);
    }
    Ok(if sc.pass() { Status::Pass } else { Status::CheckFailed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_overrides() {
        let c = RunConfig::default();
        let a = run_digest(&c, "verify", 1, None, 1.0);
        assert_eq!(a, run_digest(&c, "verify", 1, None, 1.0));
        assert_ne!(a, run_digest(&c, "verify", 2, None, 1.0));
        assert_ne!(a, run_digest(&c, "verify", 1, Some(100), 1.0));
        assert_ne!(a, run_digest(&c, "action", 1, None, 1.0));
    }

    #[test]
    fn scale_leaves_ratio_thresholds() {
        let t = effective_tolerances(&RunConfig::default(), 10.0);
        assert!((t.cs1 / 1e-5 - 1.0).abs() < 1e-12);
        assert_eq!(t.gevrey_table, Tolerances::default().gevrey_table);
    }
}
