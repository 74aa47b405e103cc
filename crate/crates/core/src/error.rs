use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("images do not form a permutation of 1..={n}")]
    NotAPermutation { n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generating tuple is empty")]
    EmptyTuple,

    #[error("measures live on different groups")]
    GroupMismatch,

    #[error("{what}: size {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("operator is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("row {row} sums to {sum} (not stochastic)")]
    NotStochastic { row: usize, sum: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("projection is not lumpable for this kernel (residual {residual:e})")]
    NotLumpable { residual: f64 },

    #[error("two-factor word for sigma({i},{j}) does not multiply out to sigma({i},{j})")]
    WordMismatch { i: usize, j: usize },

    #[error("no bound case applies to n={n}, i={i}")]
    CaseSelection { n: usize, i: usize },

    #[error("curves are not comparable: {0}")]
    CurveMismatch(String),

    #[error("malformed document: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
