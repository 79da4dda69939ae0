use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular resolvent at λ = {lambda}: {detail}")]
    SingularResolvent { lambda: Complex64, detail: String },
    #[error("non-finite integrand at node {index} (λ = {lambda})")]
    NonFinite { index: usize, lambda: Complex64 },
    #[error("decay check failed: last-node/peak ratio {ratio:.3e}; {hint}")]
    DecayCheck { ratio: f64, hint: String },
    #[error("root finder did not converge at Im λ = {im}")]
    RootFinding { im: f64 },
    #[error("accuracy guard: {0}")]
    AccuracyGuard(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("mode mismatch: {0}")]
    Mode(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
