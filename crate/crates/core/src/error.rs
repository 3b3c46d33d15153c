use thiserror::Error;

/// Errors raised by the field, calculus, noise and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is invalid: need an even N >= 16")]
    InvalidGrid(usize),

    #[error("non-finite value {value} at grid index ({i}, {j})")]
    NonFinite { i: usize, j: usize, value: f64 },

    #[error("expected {expected} grid values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("grid mismatch: N={left} vs N={right}")]
    GridMismatch { left: usize, right: usize },

    #[error("block index {j} outside -1..={j_max}")]
    BlockOutOfRange { j: i32, j_max: i32 },

    #[error("grid N={n} only supports j_max={j_max}; need j_max >= 2")]
    PartitionTooSmall { n: usize, j_max: i32 },

    #[error("unsupported Besov integrability pair (p={p}, q={q}); only 2 and infinity are available")]
    UnsupportedBesov { p: String, q: String },

    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: String },

    #[error("empty series: {0}")]
    EmptySeries(String),

    #[error("times must be strictly increasing (t[{index}]={value})")]
    NonMonotoneTimes { index: usize, value: f64 },

    #[error("history covers [{have_from}, {have_to}] but [{need_from}, {need_to}] is required")]
    InsufficientHistory { need_from: f64, need_to: f64, have_from: f64, have_to: f64 },

    #[error("renormalisation tail bound {achievable:e} cannot reach the requested relative tolerance {requested:e}")]
    UnreachableTolerance { requested: f64, achievable: f64 },

    #[error("nonlinearity violates the dissipativity assumption: {0}")]
    NotDissipative(String),

    #[error("solver blow-up at t={time}: {reason}")]
    BlowUp { time: f64, reason: String, norm_trace: Vec<(f64, f64)> },

    #[error("mismatched runs: {0}")]
    RunMismatch(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
