//! Shared error type for the compilation and solve pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid design space: {0}")]
    InvalidDesignSpace(String),

    #[error("invalid sample set: {0}")]
    InvalidSampleSet(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("underdetermined fit: {rows} rows for {terms} basis terms of order {order}")]
    Underdetermined {
        rows: usize,
        terms: usize,
        order: u32,
    },

    #[error("rank-deficient design matrix; dependent basis terms: {terms:?}")]
    RankDeficient { terms: Vec<String> },

    #[error("empty polynomial")]
    EmptyPolynomial,

    #[error("unsupported degree {degree}: quadratization handles degree <= 4")]
    UnsupportedDegree { degree: usize },

    #[error("quantization produced an all-zero matrix (epsilon {epsilon} too large)")]
    QuantizedToZero { epsilon: f64 },

    #[error("precision split infeasible for coefficient {coefficient} at ({i},{j}): {reason}")]
    InfeasibleSplit {
        i: usize,
        j: usize,
        coefficient: f64,
        reason: String,
    },

    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),

    #[error("mismatched surrogate basis: {0}")]
    MismatchedBasis(String),

    #[error("problem size {spins} spins exceeds capacity {max_spins} (largest contributor: {largest})")]
    Capacity {
        spins: usize,
        max_spins: usize,
        largest: String,
    },

    #[error("problem size {spins} exceeds brute-force cap {cap}; use a heuristic backend")]
    BruteForceCap { spins: usize, cap: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("ising dynamics diverged at step {step}")]
    Diverged { step: usize },

    #[error("degenerate gap normalization: initial energy equals the target minimum")]
    DegenerateGap,

    #[error("copy consensus violated for {violated} of {total} split copies")]
    CopyConsensus { violated: usize, total: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
