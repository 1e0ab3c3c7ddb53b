//! Shared inputs for the benchmarks.

use zetacont::fixtures::{builtin_json, CoefficientFixture};
use zetacont::{Complex64, FilterCoefficients, SeriesWeights};

/// Coefficients from the stored fixture for `m`.
pub fn fixture(m: u64) -> (FilterCoefficients, SeriesWeights) {
    let json = builtin_json(m).expect("stored fixture");
    CoefficientFixture::from_json(json)
        .and_then(|f| f.to_coefficients())
        .expect("valid fixture")
}

/// `1/2 + it`.
pub fn critical(t: f64) -> Complex64 {
    Complex64::new(0.5, t)
}
