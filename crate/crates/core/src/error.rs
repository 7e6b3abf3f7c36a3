use thiserror::Error;

/// Errors raised by the exact-arithmetic pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {what} needs {needed}, budget is {budget}")]
    Size {
        what: String,
        needed: String,
        budget: String,
    },

    #[error("invariant violated [{check}]: {detail}")]
    InvariantViolation { check: String, detail: String },

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("point not covered by the fan: {0}")]
    Coverage(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invariant(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvariantViolation {
            check: check.into(),
            detail: detail.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    pub fn size(what: impl Into<String>, needed: impl ToString, budget: impl ToString) -> Self {
        Error::Size {
            what: what.into(),
            needed: needed.to_string(),
            budget: budget.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
