use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bounds error: {0}")]
    Bounds(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("truncation insufficient: {0}")]
    Truncation(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity error at {pos}: {msg}")]
    Arity { pos: usize, msg: String },
    #[error("extraction failure: {0}")]
    Extraction(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("malformed json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
