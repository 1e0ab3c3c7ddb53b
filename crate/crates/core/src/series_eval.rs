//! Binary64 evaluation of the truncated block sum
//! `Z_m(s; N) = sum_{n<N} sum_{k=1}^m b_k (mn + k)^{-s}`,
//! the Dirichlet polynomial `sum_j a_j d_j^{-s}` and the resulting zeta estimate.
//!
//! Each block is evaluated on its own, so its value does not depend on where
//! it falls in a chunk or in which summation mode it is accumulated. Blocks far
//! from the origin are expanded around the block midpoint `X = mn + m/2`:
//!
//! `sum_k b_k (X + h_k)^{-s} = X^{-s} sum_l f_l(s) (m / 2X)^l mu_l`,
//!
//! with `h_k = k - m/2` and `mu_l = sum_k b_k (2h_k / m)^l`. The first
//! `vanishing_order` moments are exactly zero, so the expansion is free of the
//! cancellation that swamps term-by-term summation when `Re(s) < 0`.

use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::exact_linalg::Rational;
use crate::progression::{FilterCoefficients, SeriesWeights};
use crate::summation::{tree_reduce, CompensatedSum};

/// Outer blocks per parallel work unit.
pub const CHUNK_BLOCKS: u64 = 4096;
/// Largest `(|s| + 1) / (2n + 1)` at which a block is evaluated by expansion.
pub const EXPANSION_RATIO: f64 = 0.25;
/// Expansion terms kept beyond the vanishing order.
pub const EXPANSION_TERMS: usize = 41;
/// Phase error budget per term above which evaluation is refused.
pub const PHASE_BUDGET: f64 = 1e-8;
/// Relative denominator threshold: `|poly(s)| < DENOMINATOR_RTOL * sum_j |a_j|` is degenerate.
pub const DENOMINATOR_RTOL: f64 = 1e-6;

const SEGMENT_BLOCKS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    /// One compensated accumulator over the whole range.
    #[default]
    Sequential,
    /// Fixed-size chunks summed in parallel and reduced pairwise.
    Parallel,
}

impl FromStr for SumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" | "sequential" => Ok(SumMode::Sequential),
            "par" | "parallel" => Ok(SumMode::Parallel),
            other => Err(Error::InvalidArgument(format!(
                "unknown summation mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockMethod {
    /// Expansion around the block midpoint once it converges fast, terms otherwise.
    #[default]
    Auto,
    /// Every block summed term by term in index order.
    TermOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub mode: SumMode,
    pub method: BlockMethod,
    /// Permits `Re(s)` at or below the proven convergence bound.
    pub exploration: bool,
}

impl EvalOptions {
    pub fn parallel() -> Self {
        Self {
            mode: SumMode::Parallel,
            ..Self::default()
        }
    }
}

/// `base^{-s}` for an integer `base >= 1`.
pub fn complex_power_inverse(base: u64, s: Complex64) -> Complex64 {
    assert!(base >= 1, "base must be positive");
    power_from_log(dd::ln(base as f64), s)
}

/// `exp(-s * l)` with the phase reduced in double-double.
pub fn power_from_log(l: Dd, s: Complex64) -> Complex64 {
    let mag = (-(s.re.mul_add(l.hi, s.re * l.lo))).exp();
    let phase = dd::reduce_two_pi(l.mul_f64(s.im));
    let (sin, cos) = phase.sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

fn check_point(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "non-finite evaluation point {s}"
        )))
    }
}

fn check_phase(s: Complex64, largest_base: f64) -> Result<()> {
    let budget = dd::phase_error_bound(s.im, largest_base);
    if budget > PHASE_BUDGET {
        return Err(Error::PhaseBudget { budget });
    }
    Ok(())
}

/// Series weights converted to binary64 together with the expansion moments.
#[derive(Debug, Clone)]
pub struct PreparedSeries {
    m: u64,
    weights: Vec<f64>,
    vanishing_order: usize,
    abs_sum: f64,
    centered_moments: Vec<f64>,
}

impl PreparedSeries {
    pub fn new(sw: &SeriesWeights) -> Self {
        let m = sw.modulus().m();
        let weights: Vec<f64> = sw.weights().iter().map(|b| b.to_f64().unwrap()).collect();
        let v = sw.vanishing_order();
        let m_big = BigInt::from(m);
        let ratios: Vec<Rational> = (1..=m)
            .map(|k| Rational::new(BigInt::from(2 * k as i64 - m as i64), m_big.clone()))
            .collect();
        let mut powers: Vec<Rational> = vec![Rational::from_integer(1.into()); m as usize];
        let mut centered_moments = Vec::with_capacity(v + EXPANSION_TERMS);
        for _ in 0..v + EXPANSION_TERMS {
            let mu = sw
                .weights()
                .iter()
                .zip(&powers)
                .fold(Rational::zero(), |acc, (b, p)| acc + b * p);
            centered_moments.push(mu.to_f64().unwrap());
            for (p, r) in powers.iter_mut().zip(&ratios) {
                *p *= r;
            }
        }
        Self {
            m,
            abs_sum: weights.iter().map(|b| b.abs()).sum(),
            weights,
            vanishing_order: v,
            centered_moments,
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vanishing_order(&self) -> usize {
        self.vanishing_order
    }

    /// `sum_k |b_k|`.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// `sum_k b_k ((2k - m) / m)^l`, exact value rounded to binary64.
    pub fn centered_moment(&self, l: usize) -> f64 {
        self.centered_moments[l]
    }

    /// `Re(s)` above which the block sum is known to converge.
    ///
    /// `2 - v` follows from the block expansion; zero-mean periodic weights
    /// (`v >= 1`) also converge for `Re(s) > 0` by Dirichlet's test.
    pub fn convergence_bound(&self) -> f64 {
        match self.vanishing_order {
            0 => 1.0,
            v => (2.0 - v as f64).min(0.0),
        }
    }

    pub fn check_domain(&self, s: Complex64, exploration: bool) -> Result<()> {
        check_point(s)?;
        let bound = self.convergence_bound();
        if !exploration && s.re <= bound {
            return Err(Error::OutsideConvergence { sigma: s.re, bound });
        }
        Ok(())
    }

    pub fn at(&self, s: Complex64, method: BlockMethod) -> BlockEvaluator<'_> {
        BlockEvaluator::new(self, s, method)
    }

    /// `sum_{n0 <= n < n1}` of the block values.
    pub fn sum_range(
        &self,
        s: Complex64,
        n0: u64,
        n1: u64,
        opts: EvalOptions,
    ) -> Result<Complex64> {
        self.check_domain(s, opts.exploration)?;
        if n1 < n0 {
            return Err(Error::InvalidArgument(format!("empty range {n0}..{n1}")));
        }
        check_phase(s, (self.m * n1 + self.m) as f64)?;
        let ev = self.at(s, opts.method);
        let sum_chunk = |lo: u64, hi: u64| -> Result<CompensatedSum> {
            let mut acc = CompensatedSum::new();
            for n in lo..hi {
                acc.add(ev.block(n)?);
            }
            Ok(acc)
        };
        let total = match opts.mode {
            SumMode::Sequential => sum_chunk(n0, n1)?,
            SumMode::Parallel => {
                let chunks = (n1 - n0).div_ceil(CHUNK_BLOCKS);
                let parts = (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let lo = n0 + c * CHUNK_BLOCKS;
                        sum_chunk(lo, (lo + CHUNK_BLOCKS).min(n1))
                    })
                    .collect::<Result<Vec<_>>>()?;
                tree_reduce(parts)
            }
        };
        Ok(total.value())
    }

    /// Streams the partial sums `Z_m(s; N)` for `N = 1, 2, ...` into `visit`
    /// until it breaks or `n_max` is reached.
    ///
    /// Block values are computed in parallel segments when `opts.mode` is
    /// parallel; the running sum is always accumulated in index order, so the
    /// visited values are identical in both modes.
    pub fn scan_partial_sums<F>(
        &self,
        s: Complex64,
        n_max: u64,
        opts: EvalOptions,
        mut visit: F,
    ) -> Result<()>
    where
        F: FnMut(u64, Complex64) -> ControlFlow<()>,
    {
        self.check_domain(s, opts.exploration)?;
        check_phase(s, (self.m * n_max + self.m) as f64)?;
        let ev = self.at(s, opts.method);
        let mut acc = CompensatedSum::new();
        let mut buf = Vec::with_capacity(SEGMENT_BLOCKS as usize);
        let mut start = 0;
        while start < n_max {
            let end = (start + SEGMENT_BLOCKS).min(n_max);
            buf.clear();
            buf.resize((end - start) as usize, Complex64::zero());
            match opts.mode {
                SumMode::Sequential => {
                    for (i, slot) in buf.iter_mut().enumerate() {
                        *slot = ev.block(start + i as u64)?;
                    }
                }
                SumMode::Parallel => {
                    buf.par_chunks_mut(CHUNK_BLOCKS as usize)
                        .enumerate()
                        .try_for_each(|(c, chunk)| -> Result<()> {
                            let base = start + c as u64 * CHUNK_BLOCKS;
                            for (i, slot) in chunk.iter_mut().enumerate() {
                                *slot = ev.block(base + i as u64)?;
                            }
                            Ok(())
                        })?;
                }
            }
            for (i, z) in buf.iter().enumerate() {
                acc.add(*z);
                if visit(start + i as u64 + 1, acc.value()).is_break() {
                    return Ok(());
                }
            }
            start = end;
        }
        Ok(())
    }
}

/// Block values at a fixed `s`.
#[derive(Debug, Clone)]
pub struct BlockEvaluator<'a> {
    series: &'a PreparedSeries,
    s: Complex64,
    method: BlockMethod,
    scale: f64,
    coefficients: Vec<Complex64>,
}

impl<'a> BlockEvaluator<'a> {
    fn new(series: &'a PreparedSeries, s: Complex64, method: BlockMethod) -> Self {
        let scale = s.norm() + 1.0;
        let v = series.vanishing_order;
        // g_l = f_l(s) / (|s| + 1)^l, bounded by 1 in modulus
        let mut g = Complex64::new(1.0, 0.0);
        let mut coefficients = Vec::with_capacity(EXPANSION_TERMS);
        for l in 0..v + EXPANSION_TERMS {
            if l >= v {
                coefficients.push(g * series.centered_moments[l]);
            }
            g = -g * (s + l as f64) / ((l + 1) as f64 * scale);
        }
        Self {
            series,
            s,
            method,
            scale,
            coefficients,
        }
    }

    /// `f_l(s) mu_l / (|s| + 1)^l` for `l = v, v + 1, ...`.
    pub fn expansion_coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `(|s| + 1) / (2n + 1)`, the expansion ratio of block `n`.
    pub fn ratio(&self, n: u64) -> f64 {
        self.scale / (2 * n + 1) as f64
    }

    /// `sum_k b_k (mn + k)^{-s}`.
    pub fn block(&self, n: u64) -> Result<Complex64> {
        let rho = self.ratio(n);
        if self.method == BlockMethod::Auto && rho <= EXPANSION_RATIO {
            self.expanded(n, rho)
        } else {
            self.direct(n)
        }
    }

    fn direct(&self, n: u64) -> Result<Complex64> {
        let m = self.series.m;
        let mut acc = CompensatedSum::new();
        for (k, &b) in (1..=m).zip(&self.series.weights) {
            if b == 0.0 {
                continue;
            }
            let term = b * complex_power_inverse(m * n + k, self.s);
            if !(term.re.is_finite() && term.im.is_finite()) {
                return Err(Error::NonFinite { n, k });
            }
            acc.add(term);
        }
        Ok(acc.value())
    }

    fn expanded(&self, n: u64, rho: f64) -> Result<Complex64> {
        let m = self.series.m;
        // terms needed for rho^j < 2^-60
        let needed = ((-60.0 * std::f64::consts::LN_2 / rho.ln()).ceil() as usize)
            .clamp(1, self.coefficients.len());
        let mut p = Complex64::zero();
        for c in self.coefficients[..needed].iter().rev() {
            p = p * rho + c;
        }
        // ln X = ln(2mn + m) - ln 2, with 2X an exact integer
        let log_x = dd::ln((2 * m * n + m) as f64) - dd::LN2;
        let value =
            power_from_log(log_x, self.s) * p * rho.powi(self.series.vanishing_order as i32);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite { n, k: 0 });
        }
        Ok(value)
    }
}

/// `sum_{n<N} sum_k b_k (mn + k)^{-s}`.
pub fn eval_truncated(
    sw: &SeriesWeights,
    s: Complex64,
    n: u64,
    opts: EvalOptions,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    PreparedSeries::new(sw).sum_range(s, 0, n, opts)
}

/// `sum_j a_j d_j^{-s}`.
pub fn dirichlet_poly(fc: &FilterCoefficients, s: Complex64) -> Complex64 {
    fc.terms()
        .map(|(d, a)| a.to_f64().unwrap() * complex_power_inverse(d, s))
        .collect::<CompensatedSum>()
        .value()
}

/// `DENOMINATOR_RTOL * sum_j |a_j|`.
pub fn denominator_threshold(fc: &FilterCoefficients) -> f64 {
    DENOMINATOR_RTOL
        * fc.coefficients()
            .iter()
            .map(|a| a.to_f64().unwrap().abs())
            .sum::<f64>()
}

/// Truncated block sum, denominator and the zeta estimate they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedEvaluation {
    pub partial_sum: Complex64,
    pub denominator: Complex64,
    /// `partial_sum / denominator`, withheld when the denominator is degenerate.
    pub zeta_estimate: Option<Complex64>,
    pub outer_terms: u64,
    pub modulus: u64,
    pub condition_ok: bool,
    pub threshold: f64,
}

impl TruncatedEvaluation {
    pub fn zeta(&self) -> Result<Complex64> {
        self.zeta_estimate.ok_or(Error::DenominatorNearZero {
            modulus: self.denominator.norm(),
            threshold: self.threshold,
        })
    }
}

fn assemble(
    fc: &FilterCoefficients,
    s: Complex64,
    n: u64,
    partial_sum: Complex64,
) -> TruncatedEvaluation {
    let denominator = dirichlet_poly(fc, s);
    let threshold = denominator_threshold(fc);
    let condition_ok = denominator.norm() >= threshold;
    TruncatedEvaluation {
        partial_sum,
        denominator,
        zeta_estimate: condition_ok.then(|| partial_sum / denominator),
        outer_terms: n,
        modulus: fc.modulus().m(),
        condition_ok,
        threshold,
    }
}

/// Evaluates `Z_m(s; N)` and the denominator at `s`.
///
/// A degenerate denominator is reported through `condition_ok`; call
/// [`TruncatedEvaluation::zeta`] for the estimate as a `Result`.
pub fn zeta_estimate(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    n: u64,
    opts: EvalOptions,
) -> Result<TruncatedEvaluation> {
    let partial = eval_truncated(sw, s, n, opts)?;
    Ok(assemble(fc, s, n, partial))
}

/// Like [`zeta_estimate`], with the series prepared once by the caller.
pub fn zeta_estimate_prepared(
    fc: &FilterCoefficients,
    series: &PreparedSeries,
    s: Complex64,
    n: u64,
    opts: EvalOptions,
) -> Result<TruncatedEvaluation> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let partial = series.sum_range(s, 0, n, opts)?;
    Ok(assemble(fc, s, n, partial))
}

/// Zeta estimate at a point where numerator and denominator vanish together.
///
/// At `s = 0, -1, ...` the denominator has a zero that the block sum shares,
/// so the quotient is analytic but cannot be formed at `s` itself. The
/// estimate is the trapezoidal mean of `Z / poly` over `points` equally
/// spaced nodes on the circle of the given radius around `s`, which equals the
/// value at the centre up to `O((radius / R)^points)` with `R` the distance
/// to the pole at 1.
pub fn zeta_estimate_removable(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    n: u64,
    radius: f64,
    points: usize,
    opts: EvalOptions,
) -> Result<Complex64> {
    if radius.is_nan() || radius <= 0.0 || points < 2 {
        return Err(Error::InvalidArgument(
            "need radius > 0 and at least 2 nodes".into(),
        ));
    }
    if (s - 1.0).norm() <= radius {
        return Err(Error::InvalidArgument(
            "circle encloses the pole at s = 1".into(),
        ));
    }
    let series = PreparedSeries::new(sw);
    let mut acc = CompensatedSum::new();
    for j in 0..points {
        let angle = std::f64::consts::TAU * j as f64 / points as f64;
        let node = s + Complex64::from_polar(radius, angle);
        acc.add(zeta_estimate_prepared(fc, &series, node, n, opts)?.zeta()?);
    }
    Ok(acc.value() / points as f64)
}

/// `sum_{n=1}^{M} n^{-s}`.
pub fn eval_partial_dirichlet(s: Complex64, m: u64) -> Result<Complex64> {
    check_point(s)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    check_phase(s, m as f64)?;
    Ok((1..=m)
        .map(|n| complex_power_inverse(n, s))
        .collect::<CompensatedSum>()
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progression::default_coefficients;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_inverse_small_cases() {
        assert_eq!(complex_power_inverse(1, c(0.3, 7.0)), c(1.0, 0.0));
        assert!((complex_power_inverse(2, c(2.0, 0.0)) - 0.25).norm() < 1e-17);
        let z = complex_power_inverse(3, c(0.5, 14.134725));
        assert!((z - c(-0.5680863259467537, -0.10301096837546973)).norm() < 1e-15);
        assert!((z.norm() - 3f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn power_inverse_at_large_height() {
        let z = complex_power_inverse(1234567, c(0.5, 1e5));
        let want = c(-0.0007194455698050244, -0.0005407389974732314);
        assert!((z - want).norm() < 1e-15 * want.norm());
        let z = complex_power_inverse(987654321, c(2.0, -3e6));
        let want = c(-1.1881785700136375e-19, 1.018247344076634e-18);
        assert!((z - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn eta_first_block() {
        let (_, sw) = default_coefficients(2).unwrap();
        let z = eval_truncated(&sw, c(2.0, 0.0), 1, EvalOptions::default()).unwrap();
        assert_eq!(z, c(0.75, 0.0));
    }

    #[test]
    fn rejects_zero_terms_and_bad_points() {
        let (_, sw) = default_coefficients(6).unwrap();
        assert!(matches!(
            eval_truncated(&sw, c(2.0, 0.0), 0, EvalOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(eval_truncated(&sw, c(f64::NAN, 0.0), 5, EvalOptions::default()).is_err());
        assert!(matches!(
            eval_truncated(&sw, c(-2.5, 0.0), 5, EvalOptions::default()),
            Err(Error::OutsideConvergence { .. })
        ));
        let explore = EvalOptions {
            exploration: true,
            ..EvalOptions::default()
        };
        assert!(eval_truncated(&sw, c(-2.5, 0.0), 5, explore).is_ok());
    }

    #[test]
    fn phase_budget_refuses_absurd_heights() {
        let (_, sw) = default_coefficients(6).unwrap();
        let r = eval_truncated(&sw, c(0.5, 1e25), 5, EvalOptions::default());
        assert!(matches!(r, Err(Error::PhaseBudget { .. })));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("seq".parse::<SumMode>().unwrap(), SumMode::Sequential);
        assert_eq!("par".parse::<SumMode>().unwrap(), SumMode::Parallel);
        assert!("fast".parse::<SumMode>().is_err());
    }

    #[test]
    fn convergence_bounds() {
        let bound =
            |m| PreparedSeries::new(&default_coefficients(m).unwrap().1).convergence_bound();
        assert_eq!(bound(2), 0.0);
        assert_eq!(bound(6), -2.0);
        assert_eq!(bound(24), -6.0);
    }

    #[test]
    fn expansion_matches_direct_blocks() {
        for m in [6u64, 24, 60] {
            let sw = default_coefficients(m).unwrap().1;
            let series = PreparedSeries::new(&sw);
            for s in [c(2.0, 0.0), c(0.5, 30.0), c(-1.0, 0.0)] {
                let auto = series.at(s, BlockMethod::Auto);
                let direct = series.at(s, BlockMethod::TermOrder);
                let n = 400;
                let a = auto.block(n).unwrap();
                let d = direct.block(n).unwrap();
                let scale: f64 = (1..=m)
                    .map(|k| {
                        sw.weights()[k as usize - 1].to_f64().unwrap().abs()
                            * ((m * n + k) as f64).powf(-s.re)
                    })
                    .sum();
                assert!((a - d).norm() <= 1e-14 * scale, "m={m} s={s}");
            }
        }
    }
}
