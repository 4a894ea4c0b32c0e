//! Error channel of the command line layer, split by exit code.

use std::fmt;

/// Failure classes of the front end. `Config` maps to exit code 2,
/// everything else to exit code 1.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration, with the offending field spelled out.
    Config(String),
    /// A built-in check or threshold failed on otherwise valid input.
    Check(String),
    /// The simulation itself failed (propagation error, io).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hqsim_core::CoreError> for CliError {
    fn from(e: hqsim_core::CoreError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
