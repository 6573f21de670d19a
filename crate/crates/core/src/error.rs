use thiserror::Error;

/// Errors raised by generation, decomposition and word analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{sequence}: lookup index {index} at n={n} lies outside [1, {}]", .n - 1)]
    IllDefined {
        sequence: &'static str,
        n: usize,
        index: i64,
    },
    #[error("Q~({0}) is even")]
    NotOdd(usize),
    #[error("integer overflow computing level {0}")]
    Overflow(usize),
    #[error("arch level {r}: detected {field}={detected} but closed form gives {expected}")]
    SkeletonMismatch {
        r: usize,
        field: &'static str,
        detected: i64,
        expected: i64,
    },
    #[error("insufficient range: need index {needed}, have {available}")]
    InsufficientRange { needed: usize, available: usize },
    #[error("plateau at value {0} may be truncated")]
    IncompleteRange(i64),
    #[error("word must begin with 0 and end with 1")]
    BadBoundary,
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("D_{0} is odd")]
    OddAsymmetry(usize),
    #[error("machine trace for level {0} was not retained")]
    TraceMissing(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
