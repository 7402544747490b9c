use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("randomize input must be {expected} bytes, got {actual}")]
    WrongInputLength { expected: usize, actual: usize },
    #[error("malformed padding: final block carries no marker bit")]
    MalformedPadding,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("edit would remove every block")]
    EmptyResult,
    #[error("random chain has {actual} sub-blocks, expected {expected}")]
    ChainLengthMismatch { expected: usize, actual: usize },
    #[error("edit needs {expected} fresh sub-blocks, got {actual}")]
    FreshBlockCountMismatch { expected: usize, actual: usize },
    #[error("malformed signature: {0}")]
    MalformedSignature(String),
    #[error("malformed edit script, line {line}: {reason}")]
    MalformedScript { line: usize, reason: String },
    #[error("document needs at least 2 blocks, got {0}")]
    TooShort(usize),
    #[error("signature backend failure: {0}")]
    Backend(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
