use anyhow::{bail, Context, Result};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regsemi::contour::ContourConfig;
use regsemi::engine::Normalization;
use regsemi::operators::{Matrix, OperatorConfig, ResolventOperator};
use regsemi::testfn::{TestFunction, TestFunctionJson};
use regsemi::verify::Tolerances;
use regsemi::weights::WeightConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Marker for errors that map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()).into())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub weights: Option<WeightConfig>,
    pub contour: Option<ContourConfig>,
    pub operator: Option<OperatorConfig>,
    /// Matrix entries as CSV rows of interleaved re,im values.
    pub matrix_csv: Option<PathBuf>,
    pub n_tot: Option<u32>,
    pub action: Option<ActionSection>,
    pub trajectory: Option<TrajectorySection>,
    pub verify: Option<VerifySection>,
    pub example: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    #[default]
    Gd,
    Galpha,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSection {
    #[serde(default)]
    pub kind: ActionKind,
    pub alpha: Option<f64>,
    pub phi: TestFunctionSpec,
    pub x: StateSpec,
    #[serde(default)]
    pub normalization: Normalization,
    /// Add an independent reference column (matrix oracle or closed form).
    #[serde(default)]
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub times: Vec<f64>,
    pub x: StateSpec,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_p_max")]
    pub p_max: u32,
}

fn default_h() -> f64 {
    1.0
}
fn default_p_max() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub phis: Vec<TestFunctionSpec>,
    pub probes: Vec<StateSpec>,
    /// Contour for the mollified semigroup checks; they are skipped without it.
    pub pointwise_contour: Option<ContourConfig>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_shifts")]
    pub shifts: Vec<f64>,
    #[serde(default = "default_h_grid")]
    pub h_grid: Vec<f64>,
    #[serde(default = "default_true")]
    pub controls: bool,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

fn default_times() -> Vec<f64> {
    vec![0.5, 1.0]
}
fn default_shifts() -> Vec<f64> {
    vec![2.0, 3.0, 4.0, 5.0, 6.0]
}
fn default_h_grid() -> Vec<f64> {
    vec![0.1, 0.2]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionSpec {
    Bump { support: [f64; 2] },
    Chebyshev { support: [f64; 2], degree: usize, chebyshev_coefficients: Vec<f64> },
}

impl TestFunctionSpec {
    pub fn build(&self) -> Result<TestFunction> {
        Ok(match self {
            TestFunctionSpec::Bump { support } => TestFunction::bump(support[0], support[1])?,
            TestFunctionSpec::Chebyshev { support, degree, chebyshev_coefficients } => TestFunction::from_json(&TestFunctionJson {
                support: *support,
                degree: *degree,
                chebyshev_coefficients: chebyshev_coefficients.clone(),
            })?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// A bump sampled on the operator grid.
    Bump { support: [f64; 2] },
    Values { values: Vec<[f64; 2]> },
    Basis { index: usize },
    /// Entries uniform in the unit square, drawn from the run seed.
    Random,
}

impl StateSpec {
    pub fn build(&self, op: &dyn ResolventOperator, rng: &mut ChaCha8Rng) -> Result<Vec<C>> {
        let n = op.dim();
        match self {
            StateSpec::Bump { support } => {
                let Some(g) = op.grid() else { return config_err("bump states need a grid operator") };
                let f = TestFunction::bump(support[0], support[1])?;
                Ok(g.sample(|x| f.eval(x)))
            }
            StateSpec::Values { values } => {
                if values.len() != n {
                    return config_err(format!("state has {} entries, operator dimension is {n}", values.len()));
                }
                Ok(values.iter().map(|v| C::new(v[0], v[1])).collect())
            }
            StateSpec::Basis { index } => {
                if *index >= n {
                    return config_err(format!("basis index {index} out of range for dimension {n}"));
                }
                let mut x = vec![C::new(0.0, 0.0); n];
                x[*index] = C::new(1.0, 0.0);
                Ok(x)
            }
            StateSpec::Random => Ok((0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    pub fn weights(&self) -> Result<regsemi::weights::WeightSequence> {
        let w = self.weights.clone().unwrap_or(WeightConfig::Gevrey { s: 2.0, p_max: None });
        w.build().map_err(|e| ConfigError(e.to_string()).into())
    }

    pub fn contour(&self, nodes: Option<usize>) -> Result<regsemi::contour::Contour> {
        let Some(c) = &self.contour else { return config_err("missing contour section") };
        build_contour(c, nodes)
    }

    /// The operator and, for matrix inputs, the matrix itself.
    pub fn operator(&self, base: &Path) -> Result<(Arc<dyn ResolventOperator>, Option<Matrix>)> {
        match (&self.operator, &self.matrix_csv) {
            (Some(_), Some(_)) => config_err("give either operator or matrix_csv, not both"),
            (None, None) => config_err("missing operator section"),
            (None, Some(p)) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                let m = read_matrix_csv(&path)?;
                Ok((Arc::new(m.clone()), Some(m)))
            }
            (Some(OperatorConfig::Matrix { entries }), None) => {
                let m = Matrix::from_interleaved(entries).map_err(|e| ConfigError(e.to_string()))?;
                Ok((Arc::new(m.clone()), Some(m)))
            }
            (Some(cfg), None) => Ok((cfg.build().map_err(|e| ConfigError(e.to_string()))?, None)),
        }
    }
}

pub fn build_contour(c: &ContourConfig, nodes: Option<usize>) -> Result<regsemi::contour::Contour> {
    let mut c = c.clone();
    if let Some(n) = nodes {
        c.nodes = n;
    }
    c.build().map_err(|e| ConfigError(e.to_string()).into())
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let row: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| ConfigError(format!("{}: bad entry {s:?}: {e}", path.display()))))
            .collect::<std::result::Result<_, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!(ConfigError(format!("{}: empty matrix", path.display())));
    }
    Matrix::from_interleaved(&rows).map_err(|e| ConfigError(e.to_string()).into())
}
