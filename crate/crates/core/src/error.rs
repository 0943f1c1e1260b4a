use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("node is a leaf (candidate universal up to {0}) and has no children")]
    LeafNode(u64),

    #[error("input sum represents every integer up to {0}; no truant to work from")]
    UniversalInput(u64),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("odd prime {0} requires a diagonal polynomial (no 2x2 blocks)")]
    OddPrimeBlocks(u64),

    #[error("completed target is zero and every index is non-degenerate; the density series does not terminate")]
    ZeroTargetUnbounded,

    #[error("rank {0} is too small; Eisenstein intervals need rank at least 5")]
    RankTooSmall(usize),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("congruence densities did not stabilize up to level {0}")]
    NonStabilized(u32),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
