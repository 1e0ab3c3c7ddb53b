//! Truncation-error model for the block sum: the expansion coefficients
//! `f_l(s)`, the integral tail bound, order-of-magnitude error predictions,
//! predicted and empirical minimum block counts, and a measured tail.

use std::ops::ControlFlow;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::dd;
use crate::error::{Error, Result};
use crate::exact_linalg::Rational;
use crate::oracle::{correction_coefficients, OracleResult};
use crate::progression::{FilterCoefficients, SeriesWeights};
use crate::series_eval::{
    denominator_threshold, dirichlet_poly, power_from_log, BlockMethod, EvalOptions, PreparedSeries,
};
use crate::summation::CompensatedSum;

/// `f_l(s) = (-1)^l / l! * prod_{u<l} (s + u)`.
pub fn falling_coefficient(l: usize, s: Complex64) -> Complex64 {
    (0..l).fold(Complex64::new(1.0, 0.0), |acc, u| {
        -acc * (s + u as f64) / (u + 1) as f64
    })
}

/// `1 / (m (Re s + d - 1) (mN - m/2)^(Re s + d - 1))`.
pub fn tail_bound(s: Complex64, n: u64, m: u64, d: usize) -> Result<f64> {
    let alpha = s.re + d as f64 - 1.0;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tail bound diverges for Re(s) + d = {}",
            alpha + 1.0
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("N and m must be positive".into()));
    }
    let mf = m as f64;
    let base = mf * n as f64 - mf / 2.0;
    Ok((-alpha * base.ln()).exp() / (mf * alpha))
}

/// Ingredients and value of the leading-term error prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub tail_bound: f64,
    /// `sum_k b_k k^d(m)`.
    pub leading_moment: Rational,
    /// `f_d(m)(s)`.
    pub falling_factor: Complex64,
    pub denominator: Complex64,
    /// Predicted `|zeta(s) - Z_m(s; N) / poly(s)|`.
    pub predicted_error: f64,
}

fn require_model(fc: &FilterCoefficients, sw: &SeriesWeights) -> Result<usize> {
    let d = fc.modulus().divisor_count();
    if sw.vanishing_order() < d {
        return Err(Error::ModelNotApplicable {
            m: fc.modulus().m(),
            reason: "vanishing order is below d(m)",
        });
    }
    Ok(d)
}

fn conditioned_denominator(fc: &FilterCoefficients, s: Complex64) -> Result<Complex64> {
    let poly = dirichlet_poly(fc, s);
    let threshold = denominator_threshold(fc);
    if poly.norm() < threshold {
        return Err(Error::DenominatorNearZero {
            modulus: poly.norm(),
            threshold,
        });
    }
    Ok(poly)
}

/// `|T(s, N) * f_d(s) * sum_k b_k k^d / poly(s)|` with `d = d(m)`.
pub fn predicted_error(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    n: u64,
) -> Result<TailEstimate> {
    let d = require_model(fc, sw)?;
    let m = fc.modulus().m();
    let denominator = conditioned_denominator(fc, s)?;
    let tail = tail_bound(s, n, m, d)?;
    let leading_moment = sw.moment(d as u32);
    let falling_factor = falling_coefficient(d, s);
    let predicted_error =
        tail * falling_factor.norm() * leading_moment.to_f64().unwrap().abs() / denominator.norm();
    Ok(TailEstimate {
        tail_bound: tail,
        leading_moment,
        falling_factor,
        denominator,
        predicted_error,
    })
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// `|s|^d / (m (mN)^(d - 1/2) d!) * |sum_k b_k k^d| / |poly(s)|` at `s = 1/2 + it`.
pub fn critical_line_error(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    t: f64,
    n: u64,
) -> Result<f64> {
    let d = require_model(fc, sw)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let s = Complex64::new(0.5, t);
    let mf = fc.modulus().m() as f64;
    let poly = conditioned_denominator(fc, s)?;
    let moment = sw.moment(d as u32).to_f64().unwrap().abs();
    let df = d as f64;
    let log_value = df * s.norm().ln() - (df - 0.5) * (mf * n as f64).ln() - mf.ln();
    Ok(log_value.exp() / factorial(d) * moment / poly.norm())
}

/// Factor by which `N` must grow to gain a factor `eta` in accuracy: `eta^(1 / (d - 1/2))`.
pub fn kappa(d: usize, eta: f64) -> f64 {
    eta.powf(1.0 / (d as f64 - 0.5))
}

/// Smallest `N` with model error at most `target`.
///
/// On the critical line with `|s| >= 10 m` the simplified critical-line model
/// is inverted; elsewhere the full leading-term prediction is.
pub fn predict_min_n(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    target: f64,
) -> Result<u64> {
    if target.is_nan() || target <= 0.0 {
        return Err(Error::InvalidArgument("target must be positive".into()));
    }
    let d = require_model(fc, sw)?;
    let m = fc.modulus().m();
    let mf = m as f64;
    let df = d as f64;
    let poly = conditioned_denominator(fc, s)?;
    let moment = sw.moment(d as u32).to_f64().unwrap().abs();
    let blocks = if (s.re - 0.5).abs() < 1e-12 && s.norm() >= 10.0 * mf {
        // error(N) = c (mN)^-(d - 1/2)
        let c = s.norm().powf(df) / factorial(d) * moment / poly.norm() / mf;
        (c / target).powf(1.0 / (df - 0.5)) / mf
    } else {
        // error(N) = c (mN - m/2)^-alpha
        let alpha = s.re + df - 1.0;
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(
                "model diverges for Re(s) + d <= 1".into(),
            ));
        }
        let c = falling_coefficient(d, s).norm() * moment / poly.norm() / (mf * alpha);
        ((c / target).powf(1.0 / alpha) + mf / 2.0) / mf
    };
    Ok((blocks.ceil() as u64).max(1))
}

/// Rigorous bound on `|sum_{n>=N} block_n|` (numerator space), valid for
/// `Re(s) + v > 1` with `v` the vanishing order.
///
/// Each block is at most `sum_k |b_k| |f_v(s)| (m/2)^v X_n^{-Re s - v} / (1 - c/(2N+1))`
/// with `X_n = mn + m/2` and `c = max(1, (|s| + v) / (v + 1))`; the sum over
/// `n >= N` is bounded by the integral tail.
pub fn rigorous_tail_bound(sw: &SeriesWeights, s: Complex64, n: u64) -> Result<f64> {
    let v = sw.vanishing_order();
    let m = sw.modulus().m();
    let c = 1f64.max((s.norm() + v as f64) / (v as f64 + 1.0));
    let q = c / (2 * n + 1) as f64;
    if n == 0 || q >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "N = {n} too small for the geometric tail bound"
        )));
    }
    let abs_sum = sw.abs_sum().to_f64().unwrap();
    let half_m = m as f64 / 2.0;
    Ok(
        abs_sum
            * falling_coefficient(v, s).norm()
            * half_m.powi(v as i32)
            * tail_bound(s, n, m, v)?
            / (1.0 - q),
    )
}

/// `sum_{n>=N} block_n`, the exact truncation error in numerator space.
///
/// Blocks up to the point where the midpoint expansion converges fast are
/// summed directly; the rest is summed in closed form, each expansion term
/// being a Hurwitz zeta value `sum_j (j + a)^{-w}` computed by Euler–Maclaurin
/// relative to its leading term. Requires `Re(s) + v > 1`.
pub fn measured_truncation_error(sw: &SeriesWeights, s: Complex64, n: u64) -> Result<Complex64> {
    let series = PreparedSeries::new(sw);
    let v = series.vanishing_order();
    if s.re.is_nan() || s.re + v as f64 <= 1.0 {
        return Err(Error::InvalidArgument(
            "tail diverges for Re(s) + v <= 1".into(),
        ));
    }
    let scale = s.norm() + 1.0;
    let start = n.max((4.0 * scale).max(200.0).ceil() as u64);
    let opts = EvalOptions {
        exploration: true,
        ..EvalOptions::default()
    };
    let direct = series.sum_range(s, n, start, opts)?;

    let m = series.m();
    let a = start as f64 + 0.5;
    let rho = scale / (2.0 * a);
    let ev = series.at(s, BlockMethod::Auto);
    let coeffs = correction_coefficients();
    let mut acc = CompensatedSum::new();
    let mut rho_pow = rho.powi(v as i32);
    for (j, c) in ev.expansion_coefficients().iter().enumerate() {
        let w = s + (v + j) as f64;
        // E(w, a) = a^w sum_j (j + a)^{-w}
        let mut e = CompensatedSum::new();
        e.add(a / (w - 1.0));
        e.add(Complex64::new(0.5, 0.0));
        let mut rising = w;
        let mut a_pow = 1.0 / a;
        for (k, &ck) in coeffs.iter().enumerate() {
            let term = ck * rising * a_pow;
            e.add(term);
            if term.norm() < 1e-20 * a {
                break;
            }
            let kk = (k + 1) as f64;
            rising *= (w + 2.0 * kk - 1.0) * (w + 2.0 * kk);
            a_pow /= a * a;
        }
        acc.add(*c * rho_pow * e.value());
        rho_pow *= rho;
        if rho_pow < 1e-40 {
            break;
        }
    }
    let log_x = dd::ln((2 * m * start + m) as f64) - dd::LN2;
    Ok(direct + power_from_log(log_x, s) * acc.value())
}

/// `N` grid `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NGrid {
    pub start: u64,
    pub stop: u64,
    pub step: u64,
}

impl NGrid {
    pub fn new(start: u64, stop: u64, step: u64) -> Result<Self> {
        if start == 0 || step == 0 || stop < start {
            return Err(Error::InvalidArgument(format!(
                "grid needs 1 <= start <= stop and step >= 1, got {start}:{stop}:{step}"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn len(&self) -> u64 {
        (self.stop - self.start) / self.step + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u64 {
        self.start + (self.len() - 1) * self.step
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.start && n <= self.stop && (n - self.start) % self.step == 0
    }

    pub fn points(&self) -> impl Iterator<Item = u64> {
        let g = *self;
        (0..g.len()).map(move |i| g.start + i * g.step)
    }
}

impl FromStr for NGrid {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x < 2f64.powi(63))
                .map(|x| x as u64)
                .ok_or_else(|| Error::InvalidArgument(format!("bad grid value {p:?}")))
        };
        match parts.as_slice() {
            [a, b, c] => NGrid::new(parse(a)?, parse(b)?, parse(c)?),
            _ => Err(Error::InvalidArgument(format!(
                "grid must be START:STOP:STEP, got {text:?}"
            ))),
        }
    }
}

/// One grid point of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub estimate: Complex64,
    pub abs_error: f64,
}

fn checked_reference(reference: &OracleResult, tightest: f64) -> Result<()> {
    if reference.claimed_accuracy > tightest / 10.0 {
        return Err(Error::InvalidArgument(format!(
            "reference accuracy {:e} is not ten times below {tightest:e}",
            reference.claimed_accuracy
        )));
    }
    Ok(())
}

/// Streams `|Z_m(s; N) / poly(s) - reference|` at every grid point.
pub fn scan_errors<F>(
    fc: &FilterCoefficients,
    series: &PreparedSeries,
    s: Complex64,
    reference: Complex64,
    grid: NGrid,
    opts: EvalOptions,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(CurvePoint) -> ControlFlow<()>,
{
    let poly = conditioned_denominator(fc, s)?;
    series.scan_partial_sums(s, grid.last(), opts, |n, z| {
        if !grid.contains(n) {
            return ControlFlow::Continue(());
        }
        let estimate = z / poly;
        visit(CurvePoint {
            n,
            estimate,
            abs_error: (estimate - reference).norm(),
        })
    })
}

/// Error curve over `grid`.
pub fn error_curve(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    reference: &OracleResult,
    grid: NGrid,
    opts: EvalOptions,
) -> Result<Vec<CurvePoint>> {
    let series = PreparedSeries::new(sw);
    let mut out = Vec::with_capacity(grid.len() as usize);
    scan_errors(fc, &series, s, reference.value, grid, opts, |p| {
        out.push(p);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinNStatus {
    Found,
    Exhausted,
}

/// Result of a minimum-`N` scan for one target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinNOutcome {
    pub target: f64,
    pub status: MinNStatus,
    /// First passing grid point, or the last grid point when exhausted.
    pub n: u64,
    pub abs_error: f64,
    pub estimate: Complex64,
}

/// First grid point whose error is below each target, found in one pass.
///
/// The reference must be accurate to a tenth of the tightest target.
pub fn empirical_min_n(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    targets: &[f64],
    reference: &OracleResult,
    grid: NGrid,
    opts: EvalOptions,
) -> Result<Vec<MinNOutcome>> {
    if targets.is_empty() || targets.iter().any(|t| t.is_nan() || *t <= 0.0) {
        return Err(Error::InvalidArgument("targets must be positive".into()));
    }
    let tightest = targets.iter().copied().fold(f64::INFINITY, f64::min);
    checked_reference(reference, tightest)?;
    let series = PreparedSeries::new(sw);
    let mut found: Vec<Option<CurvePoint>> = vec![None; targets.len()];
    let mut last = None;
    scan_errors(fc, &series, s, reference.value, grid, opts, |p| {
        last = Some(p);
        for (slot, &t) in found.iter_mut().zip(targets) {
            if slot.is_none() && p.abs_error < t {
                *slot = Some(p);
            }
        }
        if found.iter().all(Option::is_some) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let last = last.expect("grids are nonempty");
    Ok(targets
        .iter()
        .zip(found)
        .map(|(&target, hit)| match hit {
            Some(p) => MinNOutcome {
                target,
                status: MinNStatus::Found,
                n: p.n,
                abs_error: p.abs_error,
                estimate: p.estimate,
            },
            None => MinNOutcome {
                target,
                status: MinNStatus::Exhausted,
                n: last.n,
                abs_error: last.abs_error,
                estimate: last.estimate,
            },
        })
        .collect())
}
