//! CLI error kinds and their process exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Contract(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Prefixes the message with the section or item it came from.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Contract(m) => CliError::Contract(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }
}

impl From<hovqe::Error> for CliError {
    fn from(e: hovqe::Error) -> Self {
        match e {
            hovqe::Error::Config(m) => CliError::Config(m),
            hovqe::Error::Contract(m) => CliError::Contract(m),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Contract(format!("JSON serialization failed: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
