//! Scenario files, report files, reconstructed tables and discrimination
//! batches behind the `mdiqkd` binary.

pub mod problem;
pub mod report;
pub mod scenario;
pub mod tables;

use thiserror::Error;

/// Failure classes with fixed exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure while running or writing results; exit code 3.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
