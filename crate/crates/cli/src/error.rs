use std::fmt;

use serde::Serialize;

/// Exit codes: 0 success, 2 validation, 3 budget, 4 internal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Validation,
    Budget,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Budget => 3,
            ErrorKind::Internal => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Internal,
            message: message.into(),
        }
    }

    /// Machine-readable record written to stderr on failure.
    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<hypstruct::Error> for CliError {
    fn from(e: hypstruct::Error) -> Self {
        use hypstruct::Error as E;
        let kind = match &e {
            E::BudgetExceeded { .. } => ErrorKind::Budget,
            E::MalformedInput(_)
            | E::InvalidParameter(_)
            | E::InvalidInput(_)
            | E::Precondition(_)
            | E::InvalidStructure(_)
            | E::Unsupported(_)
            | E::IncompatibleElement(_)
            | E::Disconnected(..)
            | E::NotFound(_) => ErrorKind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::internal(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::internal(format!("serialization error: {e}"))
    }
}
