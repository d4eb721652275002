use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("vector has a non-finite or missing coordinate")]
    NonFinite,

    #[error("input vectors are linearly dependent (vector {index})")]
    DependentSet { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {index} lies outside the feasible set (residual {residual:e})")]
    OutsideFeasibleSet { index: usize, residual: f64 },

    #[error("linear program broke down numerically: {0}")]
    LpBreakdown(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
