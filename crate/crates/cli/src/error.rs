use std::io;
use std::process::ExitCode;

use periodscope_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_parse_error() => 2,
            CliError::Core(e) if e.is_hypothesis_error() => 3,
            CliError::Core(_) => 4,
            CliError::Io(_) => 1,
        })
    }
}

pub const EXIT_ROW_FAILURE: u8 = 4;
