//! Command-line front end: parameter intake, solving, CSV/JSON output,
//! verification and sweeps.

pub mod args;
pub mod commands;
pub mod config;
pub mod io;

use selfsim::{ParamError, SolveError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parameter validation failed: {0}")]
    Param(#[from] ParamError),
    #[error("solver failed: {0}")]
    Solve(String),
    #[error("{0}")]
    Io(String),
    #[error("verification failed: {0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Param(_) => 2,
            CliError::Solve(_) => 3,
            CliError::ChecksFailed(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Param(p) => CliError::Param(p),
            other => CliError::Solve(other.to_string()),
        }
    }
}
