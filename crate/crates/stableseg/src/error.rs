use std::fmt;

use thiserror::Error;

/// A malformed input line, with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {error}")]
    Parse { path: String, error: ParseError },
    #[error("validation failed: {0}")]
    Validation(stableseg_core::Error),
    #[error("{0}")]
    Cap(stableseg_core::Error),
    #[error("{0}")]
    Arity(stableseg_core::Error),
    #[error("{0} oracle check(s) failed")]
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } => 3,
            CliError::Validation(_) => 4,
            CliError::Cap(_) => 5,
            CliError::Arity(_) => 6,
            CliError::Violations(_) => 7,
        }
    }
}

impl From<stableseg_core::Error> for CliError {
    fn from(e: stableseg_core::Error) -> Self {
        use stableseg_core::Error as E;
        match e {
            E::CapExceeded { .. } => CliError::Cap(e),
            E::WrongArity { .. } => CliError::Arity(e),
            _ => CliError::Validation(e),
        }
    }
}
