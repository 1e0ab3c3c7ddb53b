use thiserror::Error;

/// Errors raised by the coefficient, evaluation and oracle stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be a positive integer")]
    ZeroModulus,

    #[error("method not applicable for m = {m}: d(m) = {divisor_count} < 4")]
    MethodNotApplicable { m: u64, divisor_count: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("free-variable assignment is all zero")]
    ZeroAssignment,

    #[error("filter vector is not in the kernel of A for m = {m}")]
    NotInKernel { m: u64 },

    #[error("|denominator| = {modulus:e} is below the threshold {threshold:e}")]
    DenominatorNearZero { modulus: f64, threshold: f64 },

    #[error("1 - 2^(1-s) = {modulus:e} is too close to zero for the eta series")]
    EtaDenominatorNearZero { modulus: f64 },

    #[error("non-finite term at block n = {n}, offset k = {k}")]
    NonFinite { n: u64, k: u64 },

    #[error("Re(s) = {sigma} is outside the proven half-plane Re(s) > {bound}")]
    OutsideConvergence { sigma: f64, bound: f64 },

    #[error("error model not applicable for m = {m}: {reason}")]
    ModelNotApplicable { m: u64, reason: &'static str },

    #[error("phase error budget {budget:e} exceeds 1e-8")]
    PhaseBudget { budget: f64 },

    #[error("target accuracy {target:e} is not reachable in binary64 (best {best:e})")]
    PrecisionUnreachable { target: f64, best: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
