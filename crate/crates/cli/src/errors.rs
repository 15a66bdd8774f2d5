//! Error-to-exit-code mapping for the pipeline driver.
//!
//! 0 success, 2 configuration error, 3 capacity error, 4 solver failure.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl From<qubofoil::Error> for CliError {
    fn from(err: qubofoil::Error) -> Self {
        use qubofoil::Error::*;
        match err {
            Capacity { .. } => CliError::Capacity(err.to_string()),
            Diverged { .. } | BruteForceCap { .. } => CliError::Solver(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(format!("io: {err}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Config(format!("json: {err}"))
    }
}
