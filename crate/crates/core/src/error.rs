use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Error taxonomy shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical error: {message} (after {iterations} iterations, residual {residual:e})")]
    Numerical {
        message: String,
        iterations: usize,
        residual: f64,
    },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("degenerate tunnelling pair: {0}")]
    DegeneratePair(String),

    #[error("empty ensemble: at least one term is required")]
    EmptyEnsemble,

    #[error("insufficient design: {0}")]
    InsufficientDesign(String),

    #[error("forbidden state: T = {t} K is below the transition floor {floor} K")]
    ForbiddenState { t: f64, floor: f64 },

    #[error("out of phase: T = {t} K is above {ceiling} K")]
    OutOfPhase { t: f64, ceiling: f64 },

    #[error("unphysical parameters: {0}")]
    UnphysicalParameter(String),

    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),

    #[error("sampler failure: {0}")]
    SamplerFailure(String),

    #[error("empty series")]
    EmptySeries,

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be finite, got {value}"
        )))
    }
}
