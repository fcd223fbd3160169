use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid parameters: {0}")]
    Params(qrabi_core::Error),

    #[error("solver error: {0}")]
    Solver(qrabi_core::Error),

    #[error("{failed} sweep point(s) failed")]
    PartialFailure { failed: usize },

    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Params(_) => 1,
            CliError::Solver(_) | CliError::PartialFailure { .. } | CliError::Io { .. } => 2,
            CliError::Validation(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<qrabi_core::Error> for CliError {
    fn from(e: qrabi_core::Error) -> Self {
        CliError::Solver(e)
    }
}
