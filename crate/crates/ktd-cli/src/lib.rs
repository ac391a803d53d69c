//! Library half of the `ktd` binary: file formats, flag parsing helpers and
//! the command implementations, kept callable from integration tests.

pub mod cli;
pub mod gridspec;
pub mod image;
pub mod record;

/// Command failures carry the exit class: usage/input errors exit 2,
/// numerical failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub(crate) fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}
