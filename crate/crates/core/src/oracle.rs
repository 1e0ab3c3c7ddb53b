//! Reference values of zeta used to validate the accelerated series:
//! Euler–Maclaurin summation, the alternating eta series and closed forms.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};

use crate::dd;
use crate::error::{Error, Result};
use crate::exact_linalg::Rational;
use crate::series_eval::complex_power_inverse;
use crate::summation::CompensatedSum;

/// `zeta(3)`.
pub const APERY: f64 = 1.2020569031595942;

const MAX_BERNOULLI: usize = 64;
const MAX_CORRECTIONS: usize = 30;
const MAX_EM_CUTOFF: u64 = 1 << 27;
const ETA_DENOMINATOR_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    EulerMaclaurin,
    EtaSeries,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: Complex64,
    /// Bound on `|value - zeta(s)|`, including a rounding allowance.
    pub claimed_accuracy: f64,
    pub method: OracleMethod,
}

/// `B_0, B_1, ...` from `sum_{j<=n} C(n+1, j) B_j = 0`, with `B_1 = -1/2`.
pub fn bernoulli_numbers(count: usize) -> Result<Vec<Rational>> {
    if count > MAX_BERNOULLI {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_BERNOULLI} Bernoulli numbers are supported"
        )));
    }
    let mut b: Vec<Rational> = Vec::with_capacity(count);
    for n in 0..count {
        if n == 0 {
            b.push(Rational::from_integer(1.into()));
            continue;
        }
        let acc = b.iter().enumerate().fold(Rational::zero(), |acc, (j, bj)| {
            acc + bj * Rational::from_integer(binomial(BigInt::from(n + 1), BigInt::from(j)))
        });
        b.push(-acc / Rational::from_integer(BigInt::from(n + 1)));
    }
    Ok(b)
}

/// `B_{2k} / (2k)!` for `k = 1 ..= MAX_CORRECTIONS + 1`, as binary64.
pub(crate) fn correction_coefficients() -> &'static [f64] {
    static COEFFS: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    COEFFS.get_or_init(|| {
        let b = bernoulli_numbers(2 * MAX_CORRECTIONS + 3).expect("within table size");
        let mut factorial = Rational::from_integer(1.into());
        let mut out = Vec::new();
        for (n, bn) in b.iter().enumerate().skip(1) {
            factorial *= Rational::from_integer(BigInt::from(n));
            if n % 2 == 0 {
                out.push((bn / &factorial).to_f64().unwrap());
            }
        }
        out
    })
}

/// Closed forms at `s = 0, -1, 2, 4`.
pub fn closed_form(s: Complex64) -> Option<OracleResult> {
    if s.im != 0.0 {
        return None;
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let value = if s.re == 0.0 {
        -0.5
    } else if s.re == -1.0 {
        -1.0 / 12.0
    } else if s.re == 2.0 {
        pi2 / 6.0
    } else if s.re == 4.0 {
        pi2 * pi2 / 90.0
    } else {
        return None;
    };
    Some(OracleResult {
        value: Complex64::new(value, 0.0),
        claimed_accuracy: 2.0 * f64::EPSILON * value.abs(),
        method: OracleMethod::ClosedForm,
    })
}

/// Euler–Maclaurin summation with cutoff `M` and `K` Bernoulli corrections
/// chosen so the remainder bound plus rounding allowance stays below `target`.
///
/// The remainder after `K` corrections is bounded by
/// `|s + 2K + 1| / (Re(s) + 2K + 1)` times the first omitted correction.
pub fn zeta_euler_maclaurin(s: Complex64, target: f64) -> Result<OracleResult> {
    if !(s.re.is_finite() && s.im.is_finite()) || target.is_nan() || target <= 0.0 {
        return Err(Error::InvalidArgument(
            "need a finite point and a positive target".into(),
        ));
    }
    if s.re <= -1.0 {
        return Err(Error::OutsideConvergence {
            sigma: s.re,
            bound: -1.0,
        });
    }
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::InvalidArgument("zeta has a pole at s = 1".into()));
    }
    let coeffs = correction_coefficients();
    let mut cutoff = 16u64.max((0.4 * s.norm()).ceil() as u64);
    loop {
        let budget = dd::phase_error_bound(s.im, cutoff as f64);
        if budget > crate::series_eval::PHASE_BUDGET {
            return Err(Error::PhaseBudget { budget });
        }
        let mf = cutoff as f64;
        let m_pow = complex_power_inverse(cutoff, s);
        // corrections T_k = c_k (s)_{2k-1} M^{-s-2k+1}
        let mut rising = s;
        let mut scale = m_pow / mf;
        let mut corrections = Vec::new();
        let mut remainder = f64::INFINITY;
        for (k, &ck) in coeffs.iter().enumerate().take(MAX_CORRECTIONS + 1) {
            let t_k = rising * scale * ck;
            let kk = (k + 1) as f64;
            let sigma_k = s.re + 2.0 * kk - 1.0;
            if k >= 1 && sigma_k > 0.0 {
                // bound on stopping after the previous k corrections
                let bound = (s + 2.0 * kk - 1.0).norm() / sigma_k * t_k.norm();
                if bound <= 0.25 * target {
                    remainder = bound;
                    break;
                }
            }
            corrections.push(t_k);
            rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
            scale /= mf * mf;
        }
        if remainder.is_finite() {
            let mut acc = CompensatedSum::new();
            let mut abs_sum = 0.0;
            for n in 1..cutoff {
                let z = complex_power_inverse(n, s);
                abs_sum += z.norm();
                acc.add(z);
            }
            let head = m_pow * mf / (s - 1.0);
            let half = m_pow * 0.5;
            abs_sum += head.norm() + half.norm();
            acc.add(head);
            acc.add(half);
            for t in &corrections {
                abs_sum += t.norm();
                acc.add(*t);
            }
            let rounding = abs_sum * (8.0 * f64::EPSILON + dd::phase_error_bound(s.im, mf));
            let claimed = remainder + rounding;
            if rounding > 0.5 * target {
                return Err(Error::PrecisionUnreachable {
                    target,
                    best: claimed,
                });
            }
            return Ok(OracleResult {
                value: acc.value(),
                claimed_accuracy: claimed,
                method: OracleMethod::EulerMaclaurin,
            });
        }
        cutoff *= 2;
        if cutoff > MAX_EM_CUTOFF {
            return Err(Error::PrecisionUnreachable {
                target,
                best: f64::INFINITY,
            });
        }
    }
}

/// `sum_{n<N} ((2n+1)^{-s} - (2n+2)^{-s}) / (1 - 2^{1-s})`.
///
/// The claimed accuracy is a rigorous tail bound from two summations by parts,
/// tightened by the alternating-series bound when `s` is real.
pub fn zeta_eta(s: Complex64, n: u64) -> Result<OracleResult> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite evaluation point {s}"
        )));
    }
    if s.re <= 0.0 {
        return Err(Error::OutsideConvergence {
            sigma: s.re,
            bound: 0.0,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let denom = Complex64::new(1.0, 0.0) - 2.0 * complex_power_inverse(2, s);
    if denom.norm() < ETA_DENOMINATOR_MIN {
        return Err(Error::EtaDenominatorNearZero {
            modulus: denom.norm(),
        });
    }
    let budget = dd::phase_error_bound(s.im, (2 * n) as f64);
    if budget > crate::series_eval::PHASE_BUDGET {
        return Err(Error::PhaseBudget { budget });
    }
    let mut acc = CompensatedSum::new();
    let mut abs_sum = 0.0;
    for j in 0..n {
        let odd = complex_power_inverse(2 * j + 1, s);
        let even = complex_power_inverse(2 * j + 2, s);
        abs_sum += odd.norm() + even.norm();
        acc.add(odd);
        acc.add(-even);
    }
    let x = (2 * n + 1) as f64;
    let sigma = s.re;
    let abs_s = s.norm();
    let first = x.powf(-sigma);
    let mut tail = 0.5 * first
        + 0.5 * abs_s * x.powf(-sigma - 1.0)
        + 0.5 * abs_s * (s + 1.0).norm() * x.powf(-sigma - 1.0) / (sigma + 1.0);
    if s.im == 0.0 {
        tail = tail.min(first);
    }
    let rounding = abs_sum * (8.0 * f64::EPSILON + budget);
    Ok(OracleResult {
        value: acc.value() / denom,
        claimed_accuracy: (tail + rounding) / denom.norm(),
        method: OracleMethod::EtaSeries,
    })
}

/// Closed form when available, Euler–Maclaurin otherwise.
pub fn reference_zeta(s: Complex64, target: f64) -> Result<OracleResult> {
    match closed_form(s) {
        Some(r) => Ok(r),
        None => zeta_euler_maclaurin(s, target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_numbers(13).unwrap();
        assert_eq!(b[0], rat(1, 1));
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
        assert!(b[3].is_zero() && b[11].is_zero());
        assert!(bernoulli_numbers(65).is_err());
        assert!(bernoulli_numbers(0).unwrap().is_empty());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            closed_form(Complex64::new(-1.0, 0.0)).unwrap().value.re,
            -1.0 / 12.0
        );
        assert!(closed_form(Complex64::new(3.0, 0.0)).is_none());
        assert!(closed_form(Complex64::new(2.0, 1.0)).is_none());
    }

    #[test]
    fn euler_maclaurin_errors() {
        assert!(zeta_euler_maclaurin(Complex64::new(1.0, 0.0), 1e-10).is_err());
        assert!(zeta_euler_maclaurin(Complex64::new(-1.5, 0.0), 1e-10).is_err());
        assert!(matches!(
            zeta_euler_maclaurin(Complex64::new(2.0, 0.0), 1e-30),
            Err(Error::PrecisionUnreachable { .. })
        ));
    }

    #[test]
    fn eta_rejects_pole_and_left_half_plane() {
        assert!(matches!(
            zeta_eta(Complex64::new(1.0, 0.0), 100),
            Err(Error::EtaDenominatorNearZero { .. })
        ));
        let t = 2.0 * std::f64::consts::PI / std::f64::consts::LN_2;
        assert!(matches!(
            zeta_eta(Complex64::new(1.0, t), 100),
            Err(Error::EtaDenominatorNearZero { .. })
        ));
        assert!(zeta_eta(Complex64::new(-0.5, 0.0), 100).is_err());
    }
}
