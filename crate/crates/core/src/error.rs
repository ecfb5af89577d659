use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument: wrong dimension, empty input, bad parameter.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A bound was evaluated outside the region where its hypothesis holds.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested construction is impossible for the given inputs.
    #[error("construction failed: {0}")]
    Construction(String),

    /// Matrix Market (or other text input) could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An invariant that should hold by construction was violated.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
