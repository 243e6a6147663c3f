use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at node {node} (r = {r})")]
    NonFinite { node: usize, r: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time t = {0} is not allowed here (t must be nonzero)")]
    ZeroTime(f64),

    #[error("step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("history accumulator covers up to t = {covered}, requested t = {requested}")]
    AccumulatorGap { covered: f64, requested: f64 },

    #[error("no dyadic N0 <= {max_n0} satisfies the tail bound; residual tail {residual_tail:e} > delta0 {delta0:e}")]
    SplitFailure {
        max_n0: f64,
        residual_tail: f64,
        delta0: f64,
    },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("empty time window")]
    EmptyWindow,

    #[error("missing snapshot: {0}")]
    MissingSnapshot(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
