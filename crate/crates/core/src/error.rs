use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("module not stabilized: {0}")]
    NotStabilized(String),

    #[error("not forward-invariant: {0}")]
    NotInvariant(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
