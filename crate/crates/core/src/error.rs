use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes, so the
/// distinction between user input problems, resource bounds, and internal
/// consistency failures is part of the public contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("resource bound exceeded: {0}")]
    Bound(String),

    #[error("class data error in field `{field}`: {msg}")]
    ClassData { field: String, msg: String },

    #[error("contract violation: {0}")]
    Contract(String),

    /// Cross-checks that must never fail on correct code (e.g. closed form
    /// vs. normal form disagreeing). Reaching this is a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
