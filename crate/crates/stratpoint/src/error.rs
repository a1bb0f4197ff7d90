use thiserror::Error;

/// Errors surfaced by the exact layers of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("iteration cap exceeded: {0}")]
    IterationCap(String),
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
