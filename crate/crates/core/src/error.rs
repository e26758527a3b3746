use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("points do not span a hyperplane (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("linear system is inconsistent")]
    NoSolution,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point is not in the open cone")]
    NotInCone,
    #[error("group element is not unimodular")]
    NonUnimodular,
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("seed search exhausted after {bound} doublings")]
    SeedSearchExhausted { bound: u64 },
    #[error("perfection check failed: {0}")]
    PerfectionFailure(String),
    #[error("symbol is not Voronoi-reduced")]
    NotReduced,
    #[error("operation requires a rank-one space")]
    UnsupportedRank,
    #[error("bad Hecke coset: {0}")]
    BadCoset(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
