use std::fmt;
use std::process::ExitCode;

use morsekit_core::Error as CoreError;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io,
    Config,
    Parse,
    NonConvergence,
    Singular,
}

impl ExitKind {
    pub fn code(self) -> u8 {
        match self {
            ExitKind::Io => 1,
            ExitKind::Config => 2,
            ExitKind::Parse => 3,
            ExitKind::NonConvergence => 4,
            ExitKind::Singular => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ExitKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ExitKind::Config, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ExitKind::Parse, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ExitKind::Io, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::Singular(_) => ExitKind::Singular,
            CoreError::Convergence { .. } | CoreError::Initialization(_) => {
                ExitKind::NonConvergence
            }
            CoreError::InvalidTrace(_) => ExitKind::Parse,
            _ => ExitKind::Config,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}
