//! Accelerated periodic Dirichlet-series representations of the Riemann zeta
//! function: exact coefficient generation, truncated evaluation in an extended
//! half-plane, a truncation-error model and independent reference values.

pub mod dd;
pub mod error;
pub mod error_model;
pub mod exact_linalg;
pub mod experiments;
pub mod fixtures;
pub mod oracle;
pub mod progression;
pub mod series_eval;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use exact_linalg::{ExactMatrix, Rational};
pub use num_complex::Complex64;
pub use progression::{
    default_coefficients, derive_weights, divisor_form_decomposition, solve_filter,
    verify_vanishing, FilterCoefficients, ProgressionModulus, SeriesWeights,
};
pub use series_eval::{
    eval_truncated, zeta_estimate, zeta_estimate_removable, EvalOptions, SumMode,
    TruncatedEvaluation,
};
