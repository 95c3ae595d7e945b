use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied a value outside the accepted domain.
    #[error("invalid input: {0}")]
    Input(String),
    /// An operation was called while its precondition does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The request is well-formed but deliberately not served (size guards,
    /// unsupported combinations).
    #[error("refused: {0}")]
    Refused(String),
    /// Input is structurally degenerate (for example every point identical).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// An internal invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(format!($($arg)*)) };
}
pub(crate) use input_err;
