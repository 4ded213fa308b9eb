//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polymer id {id} out of range: system has {len} polymers")]
    InvalidPolymerId { id: usize, len: usize },

    #[error("{what} is not contained in the reference volume")]
    NotASubset { what: String },

    #[error("{what}: size {size} exceeds cap {cap} ({hint})")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("dense subset arithmetic supports volumes of at most 64 polymers, got {0}")]
    VolumeTooLarge(usize),

    #[error("activity must be nonnegative here: entry {id} is {value}")]
    NegativeActivity { id: usize, value: String },

    #[error("{what} has {got} entries, system has {want} polymers")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        want: usize,
    },

    #[error("partition function vanishes at the requested point; ratio undefined")]
    ZeroPartition,

    #[error("activity vector outside positivity region: {witness}")]
    OutsidePositivity { witness: String },

    #[error("family size must be at least 1")]
    EmptyFamily,

    #[error("subset gas requires a nonempty underlying space")]
    EmptySpace,

    #[error("invalid subset gas spec: {0}")]
    BadSubsetGasSpec(String),

    #[error("cluster tuple must have at least one entry")]
    EmptyTuple,

    #[error("series truncation order must be at least 1")]
    ZeroOrder,

    #[error("subset is not independent: {0}")]
    DependentSubset(String),

    #[error("ordering is not a permutation of the volume")]
    BadOrdering,

    #[error("degenerate optimization grid: {0}")]
    DegenerateGrid(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
