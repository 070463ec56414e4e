use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate state: {masked_fraction:.4} of the grid is masked as nodes (limit {limit})")]
    DegenerateState { masked_fraction: f64, limit: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("norm drift {drift:.3e} exceeds {limit:e} at step {step}")]
    NormDrift { drift: f64, limit: f64, step: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::InvalidState(_) => "invalid-state",
            Error::DegenerateState { .. } => "degenerate-state",
            Error::Numerical(_) => "numerical",
            Error::NormDrift { .. } => "norm-drift",
            Error::GridMismatch(_) => "grid-mismatch",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
