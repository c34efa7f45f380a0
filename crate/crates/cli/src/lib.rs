//! File formats and helpers behind the `pushmean` binary.

pub mod dimacs;
pub mod formats;
pub mod script;
pub mod search;

/// Failures the binary maps to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Exit code 3.
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

pub fn input_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Input(msg.to_string())
}
