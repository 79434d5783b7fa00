use std::io;

use repeatcap_core::Error as CoreError;
use thiserror::Error;

/// Failure of a subcommand, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum AppError {
    /// Invalid arguments or parameters outside a domain.
    #[error("{0}")]
    Usage(String),
    /// A quadrature, series or other numerical step failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// At least one reference value was not reproduced.
    #[error("{0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Verification(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Numerical(_) => 3,
            AppError::Io(_) | AppError::Csv(_) | AppError::Json(_) => 3,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        if e.is_domain() {
            AppError::Usage(e.to_string())
        } else {
            AppError::Numerical(e.to_string())
        }
    }
}
