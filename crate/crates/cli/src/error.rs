use thiserror::Error;

/// Failure classes of the command-line contract; each maps to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag values (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or inconsistent input data (exit 3).
    #[error("{0}")]
    Data(String),
    /// A computation ran but did not meet its acceptance thresholds (exit 4).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub(crate) fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

pub(crate) fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}
