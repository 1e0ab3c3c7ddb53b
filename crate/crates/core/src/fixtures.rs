//! JSON coefficient fixtures.
//!
//! Integers are written as decimal strings so readers with 64-bit integers
//! never overflow. Serialization is deterministic: regenerating a fixture
//! yields byte-identical output.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::Rational;
use crate::progression::{
    default_coefficients, FilterCoefficients, FilterKind, ProgressionModulus, SeriesWeights,
    REFERENCE_FILTERS,
};

/// Environment variable naming a directory of `m<M>.json` fixtures.
pub const FIXTURE_DIR_ENV: &str = "ZETACONT_FIXTURE_DIR";

/// Moduli whose fixtures ship with the crate.
pub const BUILTIN_MODULI: [u64; 4] = [2, 6, 24, 60];

const BUILTIN: [(u64, &str); 4] = [
    (2, include_str!("../fixtures/m2.json")),
    (6, include_str!("../fixtures/m6.json")),
    (24, include_str!("../fixtures/m24.json")),
    (60, include_str!("../fixtures/m60.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureSource {
    #[serde(rename = "paper")]
    Reference,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientFixture {
    pub m: u64,
    pub divisors: Vec<u64>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub vanishing_order: usize,
    pub source: FixtureSource,
}

impl CoefficientFixture {
    pub fn from_coefficients(fc: &FilterCoefficients, sw: &SeriesWeights) -> Self {
        let m = fc.modulus().m();
        let published = m == 2 || REFERENCE_FILTERS.iter().any(|(pm, _)| *pm == m);
        Self {
            m,
            divisors: fc.modulus().divisors().to_vec(),
            a: fc.coefficients().iter().map(integer_string).collect(),
            b: sw.weights().iter().map(integer_string).collect(),
            vanishing_order: sw.vanishing_order(),
            source: if published {
                FixtureSource::Reference
            } else {
                FixtureSource::Generated
            },
        }
    }

    /// Fresh fixture for `m` built from the default coefficients.
    pub fn generate(m: u64) -> Result<Self> {
        let (fc, sw) = default_coefficients(m)?;
        Ok(Self::from_coefficients(&fc, &sw))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixture serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses the stored vectors back into coefficient types.
    ///
    /// `b` is taken as stored, not re-derived, so a tampered fixture surfaces in
    /// the vanishing-moment checks. `a` must lie in the kernel of `A` unless the
    /// fixture is the `m = 2` baseline.
    pub fn to_coefficients(&self) -> Result<(FilterCoefficients, SeriesWeights)> {
        let modulus = ProgressionModulus::new(self.m)?;
        if modulus.divisors() != self.divisors.as_slice() {
            return Err(Error::Fixture(format!(
                "divisor list for m = {} is wrong",
                self.m
            )));
        }
        let a = parse_vector(&self.a)?;
        let b = parse_vector(&self.b)?;
        let fc = if self.m == 2 {
            let fc = FilterCoefficients::eta_baseline();
            if fc.coefficients() != a.as_slice() {
                return Err(Error::Fixture(
                    "m = 2 fixture is not the eta baseline".into(),
                ));
            }
            fc
        } else {
            FilterCoefficients::new(modulus.clone(), a)?
        };
        debug_assert!(self.m == 2 || fc.kind() == FilterKind::Kernel);
        let sw = SeriesWeights::new(modulus, b)?;
        Ok((fc, sw))
    }
}

fn integer_string(x: &Rational) -> String {
    debug_assert!(x.is_integer());
    x.to_integer().to_string()
}

fn parse_vector(v: &[String]) -> Result<Vec<Rational>> {
    v.iter()
        .map(|s| {
            s.parse::<BigInt>()
                .map(Rational::from_integer)
                .map_err(|_| Error::Fixture(format!("not an integer: {s:?}")))
        })
        .collect()
}

/// The fixture compiled into the crate for `m`, if any.
pub fn builtin(m: u64) -> Option<CoefficientFixture> {
    BUILTIN
        .iter()
        .find(|(bm, _)| *bm == m)
        .map(|(_, text)| CoefficientFixture::from_json(text).expect("builtin fixtures parse"))
}

pub fn builtin_json(m: u64) -> Option<&'static str> {
    BUILTIN.iter().find(|(bm, _)| *bm == m).map(|(_, t)| *t)
}

pub fn fixture_path(dir: &Path, m: u64) -> PathBuf {
    dir.join(format!("m{m}.json"))
}

/// Fixture for `m`, looked up in `dir` first, then among the built-ins, then generated.
pub fn load(dir: Option<&Path>, m: u64) -> Result<CoefficientFixture> {
    if let Some(dir) = dir {
        let path = fixture_path(dir, m);
        if path.exists() {
            return CoefficientFixture::from_json(&std::fs::read_to_string(path)?);
        }
    }
    match builtin(m) {
        Some(f) => Ok(f),
        None => CoefficientFixture::generate(m),
    }
}

/// Directory named by [`FIXTURE_DIR_ENV`], if set.
pub fn env_dir() -> Option<PathBuf> {
    std::env::var_os(FIXTURE_DIR_ENV).map(PathBuf::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_regenerate_byte_identically() {
        for m in BUILTIN_MODULI {
            let fresh = CoefficientFixture::generate(m).unwrap().to_json();
            assert_eq!(fresh, builtin_json(m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn other_moduli_are_marked_generated() {
        let f = CoefficientFixture::generate(12).unwrap();
        assert_eq!(f.source, FixtureSource::Generated);
        assert_eq!(f.divisors, vec![1, 2, 3, 4, 6, 12]);
        let (fc, sw) = f.to_coefficients().unwrap();
        assert_eq!(fc.modulus().m(), 12);
        assert!(sw.vanishing_order() >= 6);
    }

    #[test]
    fn rejects_bad_integers_and_divisors() {
        let mut f = builtin(6).unwrap();
        f.b[0] = "1.5".into();
        assert!(f.to_coefficients().is_err());
        let mut f = builtin(6).unwrap();
        f.divisors = vec![1, 2, 6];
        assert!(f.to_coefficients().is_err());
        let mut f = builtin(6).unwrap();
        f.a[0] = "2".into();
        assert!(matches!(
            f.to_coefficients(),
            Err(Error::NotInKernel { .. })
        ));
    }

    #[test]
    fn tampered_weights_keep_their_values() {
        let mut f = builtin(24).unwrap();
        f.b[15] = "-867".into();
        let (_, sw) = f.to_coefficients().unwrap();
        assert_eq!(sw.vanishing_order(), 0);
    }
}
