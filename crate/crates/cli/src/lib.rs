//! Batch front end: `compute` characteristics for a dataset, then `analyze`
//! them against outcomes.

pub mod analyze;
pub mod compute;
pub mod config;
pub mod demo;

pub use analyze::{run_analyze, AnalyzeResult};
pub use compute::{run_compute, ComputeSummary};
pub use config::{Overrides, RunConfig};

use tct_core::Error as CoreError;

/// Errors split by exit code: validation problems exit with 2, anything
/// else with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::Numerical(_) | CoreError::Json(_) => CliError::Internal(message),
            CoreError::Io { .. } => CliError::Validation(message),
            _ => CliError::Validation(message),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
