//! Double-double arithmetic: just enough for natural logarithms and phase
//! reduction accurate to roughly 2^-100 relative.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};
const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.4492935982947064e-16,
};
const TABLE_BITS: i32 = 6;
const TABLE_LEN: usize = 1 << TABLE_BITS;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::norm(p, e + self.lo * b)
    }
}

impl Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::norm(s, e + f)
    }
}

impl Neg for Dd {
    type Output = Dd;

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + -b
    }
}

impl Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        Dd::norm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::new(q3)
    }
}

/// `2 atanh(u)` summed to convergence in double-double.
fn two_atanh(u: Dd) -> Dd {
    let u2 = u * u;
    let mut power = u;
    let mut sum = u;
    for k in 1..200 {
        power = power * u2;
        let term = power / Dd::new((2 * k + 1) as f64);
        sum = sum + term;
        if term.hi.abs() < sum.hi.abs() * 1e-34 {
            break;
        }
    }
    sum.mul_f64(2.0)
}

fn log_table() -> &'static [Dd; TABLE_LEN] {
    static TABLE: OnceLock<[Dd; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [Dd::ZERO; TABLE_LEN];
        for (i, slot) in t.iter_mut().enumerate().skip(1) {
            let c = 1.0 + i as f64 / TABLE_LEN as f64;
            // (c - 1) / (c + 1), both exact in binary64
            *slot = two_atanh(Dd::new(c - 1.0) / Dd::new(c + 1.0));
        }
        t
    })
}

/// Natural logarithm of a positive finite `x` in double-double.
pub fn ln(x: f64) -> Dd {
    assert!(
        x > 0.0 && x.is_finite(),
        "ln of non-positive or non-finite value {x}"
    );
    let bits = x.to_bits();
    let mut exp = ((bits >> 52) & 0x7ff) as i32;
    let mut mant = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        // subnormal: renormalize
        let shift = mant.leading_zeros() as i32 - 11;
        mant = (mant << shift) & ((1u64 << 52) - 1);
        exp = 1 - shift;
    }
    let e = exp - 1023;
    let y = f64::from_bits(mant | (1023u64 << 52));
    let i = (mant >> (52 - TABLE_BITS)) as usize;
    let c = 1.0 + i as f64 / TABLE_LEN as f64;
    let num = y - c;
    let (den_hi, den_lo) = two_sum(y, c);
    let u = Dd::new(num)
        / Dd {
            hi: den_hi,
            lo: den_lo,
        };
    // |u| < 1/128: u^3 and u^5 need double-double, later terms fit in binary64.
    let u2 = u * u;
    let u3 = u2 * u;
    let u5 = u3 * u2;
    let v = u2.hi;
    let tail = u5.hi * v * (1.0 / 7.0 + v * (1.0 / 9.0 + v * (1.0 / 11.0 + v / 13.0)));
    let frac = (u + u3 / Dd::new(3.0) + u5 / Dd::new(5.0) + Dd::new(tail)).mul_f64(2.0);
    LN2.mul_f64(e as f64) + log_table()[i] + frac
}

/// Reduces `theta` modulo 2π into `[-π, π]`.
pub fn reduce_two_pi(theta: Dd) -> f64 {
    let k = (theta.hi / TWO_PI.hi).round();
    let (p, e) = two_prod(k, TWO_PI.hi);
    let kp = Dd::norm(p, e + k * TWO_PI.lo);
    (theta - kp).to_f64()
}

/// Upper bound on the phase error of one `x^{-s}` evaluation with `|Im s| = t`.
pub fn phase_error_bound(t: f64, x: f64) -> f64 {
    let log_part = t.abs() * x.max(2.0).ln() * 2f64.powi(-100);
    let reduction = (t.abs() * x.max(2.0).ln() / TWO_PI.hi + 1.0) * 2f64.powi(-104);
    log_part + reduction + 4.0 * f64::EPSILON * std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_dd(got: Dd, hi: f64, lo: f64) {
        let err = (got.hi - hi) + (got.lo - lo);
        assert!(err.abs() <= hi.abs() * 1e-30, "{got:?} vs ({hi}, {lo})");
    }

    #[test]
    fn logs_match_high_precision_values() {
        assert_dd(ln(3.0), 1.0986122886681098, -9.07129723500153e-17);
        assert_dd(ln(1e10), 23.025850929940457, -3.94399383981999e-16);
        assert_dd(ln(123456789.0), 18.63140176616802, -2.0819353844153095e-16);
        assert_dd(ln(1.5), 0.4054651081081644, -2.8811380259626426e-18);
        assert_dd(
            ln(2f64.powi(40) + 7.0),
            27.72588722240418,
            3.944028557246961e-17,
        );
        assert_dd(ln(6000001.0), 15.607270193858982, -7.210447438525043e-17);
    }

    #[test]
    fn log_edge_cases() {
        assert_eq!(ln(1.0), Dd::ZERO);
        assert_dd(ln(2.0), LN2.hi, LN2.lo);
        assert_dd(ln(0.5), -LN2.hi, -LN2.lo);
        let tiny = ln(f64::MIN_POSITIVE / 8.0);
        assert!((tiny.to_f64() - (f64::MIN_POSITIVE / 8.0).ln()).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn log_rejects_zero() {
        ln(0.0);
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let back = a.mul_f64(3.0);
        assert!((back.hi - 1.0 + back.lo).abs() < 1e-31);
    }

    #[test]
    fn phase_reduction_is_in_range() {
        for k in [-3.0, 0.0, 1.0, 1e6] {
            let theta = TWO_PI.mul_f64(k) + Dd::new(0.25);
            let r = reduce_two_pi(theta);
            assert!((r - 0.25).abs() < 1e-15, "k = {k}: {r}");
        }
        assert!(phase_error_bound(1e7, 1e10) < 1e-14);
    }
}
