use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("size cap exceeded: {0}")]
    Size(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numeric failure: {message} (last residual {residual:e})")]
    Numeric { message: String, residual: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("lemma violated: {0}")]
    LemmaViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate game: {0}")]
    Degenerate(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
