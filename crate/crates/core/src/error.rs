use thiserror::Error;

/// Errors raised by the matrix kernel and every checker built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix data has {actual} entries, expected rows * cols = {expected}")]
    WrongLength { expected: usize, actual: usize },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (||m - m*||_F = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad exponent: {0}")]
    BadExponent(String),

    #[error("bad dimension {0}")]
    BadDimension(usize),

    #[error("sequence entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("dominance violated at index {index}: {a} > {b}")]
    DominanceViolated { index: usize, a: f64, b: f64 },

    #[error("operator is not a contraction (||z|| = {norm})")]
    NotContraction { norm: f64 },

    #[error("vector is not a unit vector (||xi|| = {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is not an orthogonal projection (residual {residual:e})")]
    NotProjection { residual: f64 },

    #[error("projection has rank {rank}, expected 1")]
    NotRankOne { rank: usize },

    #[error("degenerate singular-value cluster straddles the rank cutoff at index {index}")]
    DegenerateCluster { index: usize },

    #[error("premise not met: {0}")]
    PremiseNotMet(String),

    #[error("invalid norm descriptor {0:?}")]
    UnknownNorm(String),

    #[error("unknown campaign suite {0:?}")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
