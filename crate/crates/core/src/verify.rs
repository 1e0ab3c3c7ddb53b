//! Self-check suites run by `zetacont verify`.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact_linalg::Rational;
use crate::fixtures::{self, CoefficientFixture, BUILTIN_MODULI};
use crate::oracle::{closed_form, zeta_eta, zeta_euler_maclaurin, OracleResult, APERY};
use crate::progression::{build_a, left_kernel_witness, verify_vanishing, ProgressionModulus};

pub const SUITES: [&str; 5] = ["fixtures", "witness", "determinants", "vanishing", "oracle"];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

type SuiteBody = fn(&mut Tally, Option<&Path>, u64);

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, fixture_dir: Option<&Path>, seed: u64) -> Option<SuiteReport> {
    let (suite, body): (&'static str, SuiteBody) = match name {
        "fixtures" => ("fixtures", suite_fixtures),
        "witness" => ("witness", suite_witness),
        "determinants" => ("determinants", suite_determinants),
        "vanishing" => ("vanishing", suite_vanishing),
        "oracle" => ("oracle", suite_oracle),
        _ => return None,
    };
    let start = Instant::now();
    let mut tally = Tally::new();
    body(&mut tally, fixture_dir, seed);
    Some(SuiteReport {
        suite,
        passed: tally.failures.is_empty(),
        checks: tally.checks,
        failures: tally.failures,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn fixture_text(dir: Option<&Path>, m: u64) -> Result<String, String> {
    if let Some(dir) = dir {
        let path = fixtures::fixture_path(dir, m);
        if path.exists() {
            return std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()));
        }
    }
    fixtures::builtin_json(m)
        .map(str::to_owned)
        .ok_or_else(|| format!("no fixture for m = {m}"))
}

fn suite_fixtures(t: &mut Tally, dir: Option<&Path>, _: u64) {
    for m in BUILTIN_MODULI {
        let fresh = CoefficientFixture::generate(m).map(|f| f.to_json());
        match (fixture_text(dir, m), fresh) {
            (Ok(stored), Ok(fresh)) => t.check(stored == fresh, || {
                format!("m = {m}: stored fixture differs from regenerated")
            }),
            (Err(e), _) => t.check(false, || e),
            (_, Err(e)) => t.check(false, || format!("m = {m}: {e}")),
        }
    }
}

fn suite_witness(t: &mut Tally, _: Option<&Path>, _: u64) {
    for m in 1..=1000u64 {
        let pm = ProgressionModulus::new(m).expect("positive");
        if pm.divisor_count() < 4 {
            continue;
        }
        let ok = left_kernel_witness(&pm)
            .and_then(|c| build_a(&pm).vec_mat(&c))
            .map(|row| row.iter().all(Zero::is_zero))
            .unwrap_or(false);
        t.check(ok, || format!("m = {m}: witness does not annihilate A"));
    }
}

fn suite_determinants(t: &mut Tally, _: Option<&Path>, _: u64) {
    for p in (2..=1000u64).filter(|&p| is_prime(p)) {
        let q = Rational::from_integer(p.into());
        let one = Rational::from_integer(1.into());
        let det = build_a(&ProgressionModulus::new(p).unwrap())
            .determinant()
            .unwrap();
        let closed = &q * (&q - &one) / Rational::from_integer(2.into());
        t.check(det == closed && !det.is_zero(), || {
            format!("p = {p}: det(A) = {det}")
        });
        if p * p <= 1000 {
            let det = build_a(&ProgressionModulus::new(p * p).unwrap())
                .determinant()
                .unwrap();
            let q2 = &q * &q;
            let closed = &q2 * &q2 / Rational::from_integer(12.into())
                * (&q2 - &one)
                * (&q2 - Rational::from_integer(2.into()) * &q + &one);
            t.check(det == closed && !det.is_zero(), || {
                format!("p^2 = {}: det(A) = {det}", p * p)
            });
        }
    }
}

fn suite_vanishing(t: &mut Tally, dir: Option<&Path>, _: u64) {
    for m in BUILTIN_MODULI {
        let parsed = fixture_text(dir, m)
            .and_then(|text| CoefficientFixture::from_json(&text).map_err(|e| e.to_string()))
            .and_then(|f| f.to_coefficients().map_err(|e| e.to_string()));
        let (fc, sw) = match parsed {
            Ok(x) => x,
            Err(e) => {
                t.check(false, || format!("m = {m}: {e}"));
                continue;
            }
        };
        let order = if m == 2 {
            1
        } else {
            fc.modulus().divisor_count()
        };
        let report = verify_vanishing(&sw, order);
        t.check(report.passed(), || {
            format!(
                "m = {m}: moment r = {} does not vanish",
                report.first_nonzero().unwrap()
            )
        });
        let leading = sw.moment(order as u32);
        t.check(!leading.is_zero(), || {
            format!("m = {m}: moment r = {order} vanishes")
        });
    }
}

fn agree(a: &OracleResult, b: &OracleResult) -> bool {
    (a.value - b.value).norm() <= a.claimed_accuracy + b.claimed_accuracy
}

fn suite_oracle(t: &mut Tally, _: Option<&Path>, seed: u64) {
    let known = [
        (2.0, closed_form(Complex64::new(2.0, 0.0)).unwrap().value.re),
        (3.0, APERY),
        (4.0, closed_form(Complex64::new(4.0, 0.0)).unwrap().value.re),
    ];
    for (x, value) in known {
        let s = Complex64::new(x, 0.0);
        let exact = OracleResult {
            value: Complex64::new(value, 0.0),
            claimed_accuracy: 2.0 * f64::EPSILON,
            method: crate::oracle::OracleMethod::ClosedForm,
        };
        match (zeta_euler_maclaurin(s, 1e-13), zeta_eta(s, 100_000)) {
            (Ok(em), Ok(eta)) => {
                t.check(agree(&em, &exact), || {
                    format!("Euler-Maclaurin misses zeta({x})")
                });
                t.check(agree(&eta, &exact), || {
                    format!("eta series misses zeta({x})")
                });
            }
            (Err(e), _) | (_, Err(e)) => t.check(false, || format!("zeta({x}): {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let s = Complex64::new(rng.gen_range(0.5..3.0), rng.gen_range(-1e4..1e4));
        match (zeta_euler_maclaurin(s, 1e-10), zeta_eta(s, 200_000)) {
            (Ok(em), Ok(eta)) => t.check(agree(&em, &eta), || format!("oracles disagree at {s}")),
            (Err(e), _) | (_, Err(e)) => t.check(false, || format!("{s}: {e}")),
        }
    }
}
