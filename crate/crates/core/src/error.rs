use thiserror::Error;

/// Errors raised by the matching-kernel library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition {parts:?}: {reason}")]
    InvalidPartition { parts: Vec<u32>, reason: String },

    #[error("partitions of different sizes: {left} vs {right}")]
    PartitionSizeMismatch { left: u32, right: u32 },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: expected n = {expected}, got n = {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("{what} supports n <= {limit}, got n = {n}")]
    Capability {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("newick parse error at byte {pos}: {msg}")]
    Newick { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
