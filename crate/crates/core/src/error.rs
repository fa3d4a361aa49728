use thiserror::Error;

/// Errors raised by the cipher library.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("expected {expected} bytes, got {actual}")]
    Size { expected: usize, actual: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    Index {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("matrix file: {0}")]
    MatrixFormat(String),

    #[error("permutation file: {0}")]
    PermutationFormat(String),

    #[error("permutation table is not a bijection")]
    NotBijective,

    #[error("round count {0} out of range")]
    Rounds(usize),

    #[error("invalid component: {0}")]
    InvalidComponent(String),

    #[error("wide-trail bound inputs must be positive")]
    NonPositive,

    #[error("KAT line {line}: {msg}")]
    Kat { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
