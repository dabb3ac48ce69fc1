use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("(a, b) is not unitary: |a|^2 + |b|^2 = {0}")]
    NonUnitary(String),

    #[error("{label} basis has numeric rank {found}, expected {expected}")]
    RankMismatch { label: &'static str, found: usize, expected: usize },

    #[error("group element certificate failed: {check} residual {residual:e} exceeds {tolerance:e}")]
    Certificate { check: &'static str, residual: f64, tolerance: f64 },

    #[error("singular-value gap ratio {ratio:.3} below 10 at rank {rank}; dimension is uncertain")]
    UncertainRank { rank: usize, ratio: f64 },

    #[error("ambiguous at eps {eps:e}: {first} or {second} (margin {margin:e})")]
    Ambiguous { first: String, second: String, margin: f64, eps: f64 },

    #[error("invariant fit is broken: relative residual {0:e}")]
    Calibration(f64),

    #[error("invariants are inconsistent with a diagonal form: {0}")]
    Inconsistent(String),

    #[error("diagonal entries must be nonnegative and finite, got {0:?}")]
    BadDiagonal([f64; 4]),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
