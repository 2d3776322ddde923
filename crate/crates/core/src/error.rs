use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped by how the command-line front end reports them:
/// validation problems, exhausted budgets, and everything else.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("element does not belong to the model's group: {0}")]
    IncompatibleElement(String),
    #[error("orbit graph is disconnected: points {0} and {1} are separated")]
    Disconnected(usize, usize),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: String, limit: u64 },
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit,
        }
    }

    /// True for errors caused by a budget guard rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
