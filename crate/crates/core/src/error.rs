use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric positive-definite: {0}")]
    NotSpd(String),

    #[error("condition number {cond:.3e} exceeds cap {cap:.3e}")]
    IllConditioned { cond: f64, cap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance trace term is negative beyond rounding: {0:e}")]
    NegativeTrace(f64),

    #[error("dates do not align: {0}")]
    DateMisalignment(String),

    #[error("factor matrix is rank deficient (singular value ratio {ratio:.3e})")]
    RankDeficientFactors { ratio: f64 },

    #[error("insufficient observations: {got} periods for {needed} required")]
    InsufficientObservations { got: usize, needed: usize },

    #[error("series too short: length {len}, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero residual variance for {0}")]
    ZeroVariance(String),

    #[error("measure kinds differ: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("asset identifiers differ between measure vectors")]
    AssetMismatch,

    #[error("need at least 5 funds to form quintiles, got {0}")]
    TooFewFunds(usize),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("degenerate degrees of freedom: L = {l} must exceed n + 2 = {}", n + 2)]
    DegenerateDof { n: usize, l: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no usable rows in window")]
    EmptyWindow,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("cannot select {n} of {universe} assets")]
    NTooLarge { n: usize, universe: usize },

    #[error("unknown column or factor: {0}")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
