use thiserror::Error;

/// Errors raised by state construction, protocol runs and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qudit dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("qudit dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("empty register")]
    EmptyRegister,

    #[error("size guard: {what} needs dimension {dim}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        dim: u128,
        limit: usize,
    },

    #[error("operator is {rows}x{cols}, expected {d}x{d}")]
    OperatorShape { rows: usize, cols: usize, d: usize },

    #[error("{what} = {value} is out of range for d = {d}")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        d: usize,
    },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("tuple {tuple:?} violates the residue constraints (u = {u}, v = {v}, d = {d})")]
    ConstraintViolation {
        tuple: Vec<usize>,
        u: usize,
        v: usize,
        d: usize,
    },

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("register mismatch: {0}")]
    RegisterMismatch(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("relabeling is not a bijection: {0}")]
    NotBijective(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
