use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("transvection needs distinct rows, got i = j = {0}")]
    DegenerateTransvection(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("n = {n} does not fit a {bits}-bit key")]
    KeyTooLarge { n: usize, bits: usize },

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    GroupTooLarge { n: usize, cap: usize },

    #[error("rejection sampler gave up after {0} attempts")]
    SamplingExhausted(u64),

    #[error("the chain needs n >= 2, got n = {0}")]
    TooSmall(usize),

    #[error("chain is periodic (period {period}); use the lazy kernel")]
    Periodic { period: u32 },

    #[error("did not reach eps = {eps} within {max_t} steps")]
    NotConverged { eps: f64, max_t: u64 },

    #[error("eigensolver did not converge after {0} iterations")]
    EigenNotConverged(usize),

    #[error("curve does not bracket {0}")]
    NoBracket(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
