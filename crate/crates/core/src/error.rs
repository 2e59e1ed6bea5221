use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid chart: {0}")]
    Chart(String),
    #[error("truncation too low: {0}")]
    Truncation(String),
    #[error("λ-divisibility violated: {0}")]
    Divisibility(String),
    #[error("unsupported series class: {0}")]
    Unsupported(String),
    #[error("degree-raising contract violated: {0}")]
    NotRaising(String),
    #[error("identity failed: {0}")]
    Identity(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
