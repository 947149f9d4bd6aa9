//! Library side of the `qplay` binary: argument parsing, config merging,
//! headless runs and the server entry point.

pub mod args;
pub mod headless;
pub mod serve;

use std::fmt;

/// Failure of a CLI operation, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config file. Exit code 2.
    Config(String),
    /// Anything that went wrong after validation. Exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
