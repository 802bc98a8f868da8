//! Crate-wide error type.

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's input domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An operation was called in a state it cannot serve (empty buffer,
    /// missing checkpoint, ...).
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// A numeric failure: non-finite values where finite ones are required.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A persisted artifact could not be decoded.
    #[error("malformed data: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn invalid_state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
