use thiserror::Error;

/// Errors raised by the decomposition toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix must have dimension at least 1")]
    EmptyMatrix,

    #[error("entry array has {got} values, expected {expected}")]
    BadShape { expected: usize, got: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {allowed:.3e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:.3e})"
    )]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("empty family")]
    EmptyFamily,

    #[error("invalid family size N = {n}: {reason}")]
    InvalidCount { n: usize, reason: String },

    #[error("operator T is zero")]
    ZeroOperator,

    #[error("operator T is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("operator is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("operator T is not rank one (second eigenvalue {0:.3e})")]
    NotRankOne(f64),

    #[error("operator T is singular (smallest |eigenvalue| {0:.3e})")]
    Singular(f64),

    #[error("operator T is not a projection (||T^2 - T|| = {0:.3e})")]
    NotProjection(f64),

    #[error("family does not decompose T (residual {0:.3e})")]
    NotADecomposition(f64),

    #[error("family is not symmetric (max Gram deviation {0:.3e})")]
    NotSymmetric(f64),

    #[error("family is degenerate: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("member {index} has Tr[E^2] = {value}, expected 1")]
    NotNormalized { index: usize, value: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("weight coefficient {coefficient} is below the dimension {dim}")]
    WeightCoefficientTooSmall { coefficient: f64, dim: usize },

    #[error("negative inner product {value:.3e} between members {i} and {j}")]
    NegativeInnerProduct { i: usize, j: usize, value: f64 },

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
