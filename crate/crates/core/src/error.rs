use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live on different possibility spaces")]
    SpaceMismatch,
    #[error("assessment domain is empty")]
    EmptyDomain,
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("expected a {expected} assessment")]
    Orientation { expected: &'static str },
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("invalid prevision: {0}")]
    InvalidPrevision(String),
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("empty event")]
    EmptyEvent,
    #[error("internal error: {0}")]
    Internal(String),
}
