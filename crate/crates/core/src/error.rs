use thiserror::Error;

/// Errors raised by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:.3e}")]
    NonHermitianInput { deviation: f64 },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("monotone order must be a finite real >= 1, got {0}")]
    InvalidOrder(f64),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not an isometry: max |u^dagger u - I| = {residual:.3e}")]
    NotIsometry { residual: f64 },

    #[error("isometry has {found} columns but the state has rank {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("fidelity {0} outside [0, 1]")]
    InvalidFidelity(f64),

    #[error("Fock truncation inadequate: {0}")]
    TruncationInadequate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
