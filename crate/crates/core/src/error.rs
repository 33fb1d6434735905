use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("generator index 0 is not a valid generator")]
    ZeroIndex,

    #[error("letter sign must be +1 or -1, got {0}")]
    BadSign(i64),

    #[error("rank mismatch: expected {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("need at least {min} obstacles, got {found}")]
    TooFewObstacles { min: usize, found: usize },

    #[error("image of generator {0} is not freely reduced")]
    UnreducedImage(usize),

    #[error("cannot parse protocol token `{0}`")]
    BadToken(String),

    #[error("empty protocol has no efficiency")]
    EmptyProtocol,

    #[error("automorphism does not act trivially on homology (generator {generator})")]
    HomologyNotFixed { generator: usize },

    #[error("length cap {cap} exceeded after {completed} iteration(s)")]
    LengthCapExceeded { cap: usize, completed: usize },

    #[error("iteration count must be at least 1")]
    NoIterations,

    #[error("enumeration of {requested} products exceeds budget {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("vector entries must be strictly positive")]
    NonPositiveEntry,

    #[error("root finding did not converge; certified upper bracket {bracket}")]
    NoConvergence { bracket: f64 },

    #[error("{lambda} is not a root of the polynomial (nearest root at distance {distance})")]
    NotARoot { lambda: f64, distance: f64 },

    #[error("bound chain out of order for N = {n}: {detail}")]
    OrderingViolation { n: usize, detail: String },

    #[error("matrix set is not closed under transposition")]
    NotTransposeClosed,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
