use std::path::PathBuf;

/// Errors produced by the estimators and their I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too narrow: |phi_{index}| = {value:.3e} at the boundary (limit 1e-8)")]
    GridTooNarrow { index: usize, value: f64 },

    #[error("point {0} lies outside the grid")]
    Extrapolation(f64),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("solver did not converge after {iterations} iterations (last step {last_step:.3e})")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        /// Best iterate reached before giving up.
        best: Vec<crate::C64>,
    },

    #[error("constraint infeasible: {0}")]
    ConstraintInfeasible(String),

    #[error("unidentifiable configuration: {0}")]
    Unidentifiable(String),

    #[error("numerical singularity: {0}")]
    Singular(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
