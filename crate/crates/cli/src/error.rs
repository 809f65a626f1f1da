use std::io;

use alphagan_core::AganError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Divergence(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(AganError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 0 success, 2 verification failure, 3 training divergence, 4 I/O, format or argument error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Divergence(_) => 3,
            CliError::Usage(_) | CliError::Core(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<AganError> for CliError {
    fn from(e: AganError) -> Self {
        match e {
            AganError::Divergence { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(AganError::Json(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
