use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("unknown keys in scenario: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Core(#[from] fluidclock_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::UnknownKeys(_) => "unknown-keys",
            CliError::Scenario(_) => "scenario",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { kind: self.kind().to_string(), message: self.to_string() }
    }
}

/// Machine-readable failure written into the run summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;
