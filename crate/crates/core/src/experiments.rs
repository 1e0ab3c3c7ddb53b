//! Row types and drivers behind the command-line experiments.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_model::{empirical_min_n, error_curve, predicted_error, MinNStatus, NGrid};
use crate::oracle::{reference_zeta, OracleResult};
use crate::progression::{FilterCoefficients, SeriesWeights};
use crate::series_eval::{zeta_estimate, EvalOptions};

/// Column order of every CSV the tool writes.
pub const CSV_COLUMNS: [&str; 10] = [
    "m",
    "t",
    "sigma",
    "N",
    "target",
    "value_re",
    "value_im",
    "abs_error",
    "predicted_error",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Exhausted,
    DenominatorNearZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub m: u64,
    pub t: f64,
    pub sigma: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub target: Option<f64>,
    pub value_re: Option<f64>,
    pub value_im: Option<f64>,
    pub abs_error: Option<f64>,
    pub predicted_error: Option<f64>,
    pub status: RowStatus,
}

/// One cell of the reference minimum-`N` tables at `s = 1/2 + it`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinNCell {
    pub t: f64,
    pub m: u64,
    pub target: f64,
    pub reference_n: f64,
    /// Cheap enough to recompute on a workstation.
    pub desk_scale: bool,
}

const fn cell(t: f64, m: u64, target: f64, reference_n: f64, desk_scale: bool) -> MinNCell {
    MinNCell {
        t,
        m,
        target,
        reference_n,
        desk_scale,
    }
}

/// Reference minimum `N` for errors below 1e-3, 1e-4 and 1e-5.
pub const ACCURACY_TABLE: [MinNCell; 48] = [
    cell(1e4, 60, 1e-3, 2.4e2, true),
    cell(1e4, 24, 1e-3, 4.5e2, true),
    cell(1e4, 6, 1e-3, 2e3, true),
    cell(1e4, 2, 1e-3, 7.5e4, true),
    cell(1e5, 60, 1e-3, 1.7e3, true),
    cell(1e5, 24, 1e-3, 4.25e3, true),
    cell(1e5, 6, 1e-3, 1.8e4, true),
    cell(1e5, 2, 1e-3, 6.5e4, true),
    cell(1e6, 60, 1e-3, 2.7e4, false),
    cell(1e6, 24, 1e-3, 4.3e4, false),
    cell(1e6, 6, 1e-3, 1.7e5, false),
    cell(1e6, 2, 1e-3, 2.4e5, false),
    cell(1e7, 60, 1e-3, 2.7e5, false),
    cell(1e7, 24, 1e-3, 4.1e5, false),
    cell(1e7, 6, 1e-3, 1.7e6, false),
    cell(1e7, 2, 1e-3, 2.4e6, false),
    cell(1e4, 60, 1e-4, 3.2e2, true),
    cell(1e4, 24, 1e-4, 8.1e2, true),
    cell(1e4, 6, 1e-4, 2.9e3, true),
    cell(1e4, 2, 1e-4, 7e6, false),
    cell(1e5, 60, 1e-4, 2.7e3, true),
    cell(1e5, 24, 1e-4, 8e3, true),
    cell(1e5, 6, 1e-4, 2.3e4, true),
    cell(1e5, 2, 1e-4, 5.1e6, false),
    cell(1e6, 60, 1e-4, 3.2e4, false),
    cell(1e6, 24, 1e-4, 8e4, false),
    cell(1e6, 6, 1e-4, 2.1e5, false),
    cell(1e6, 2, 1e-4, 6e6, false),
    cell(1e7, 60, 1e-4, 3.2e5, false),
    cell(1e7, 24, 1e-4, 8e5, false),
    cell(1e7, 6, 1e-4, 1.8e6, false),
    cell(1e7, 2, 1e-4, 7.3e7, false),
    cell(1e4, 60, 1e-5, 3.3e2, true),
    cell(1e4, 24, 1e-5, 8.8e3, true),
    cell(1e4, 6, 1e-5, 5e3, true),
    cell(1e4, 2, 1e-5, 7e8, false),
    cell(1e5, 60, 1e-5, 3.2e3, true),
    cell(1e5, 24, 1e-5, 8.3e3, true),
    cell(1e5, 6, 1e-5, 3.7e4, true),
    cell(1e5, 2, 1e-5, 5.1e8, false),
    cell(1e6, 60, 1e-5, 3.2e4, false),
    cell(1e6, 24, 1e-5, 8.2e4, false),
    cell(1e6, 6, 1e-5, 3.1e5, false),
    cell(1e6, 2, 1e-5, 6e8, false),
    cell(1e7, 60, 1e-5, 3.2e5, false),
    cell(1e7, 24, 1e-5, 8e5, false),
    cell(1e7, 6, 1e-5, 2.4e6, false),
    cell(1e7, 2, 1e-5, 7.3e9, false),
];

/// Reference minimum `N` at `t = 1e5` for errors 1e-6 through 1e-9.
pub const SCALING_TABLE: [MinNCell; 12] = [
    cell(1e5, 60, 1e-6, 3.33e3, true),
    cell(1e5, 24, 1e-6, 9.4e3, true),
    cell(1e5, 6, 1e-6, 6.7e4, true),
    cell(1e5, 60, 1e-7, 3.61e3, true),
    cell(1e5, 24, 1e-7, 1.14e4, true),
    cell(1e5, 6, 1e-7, 1.27e5, true),
    cell(1e5, 60, 1e-8, 4.08e3, true),
    cell(1e5, 24, 1e-8, 1.46e4, true),
    cell(1e5, 6, 1e-8, 2.43e5, true),
    cell(1e5, 60, 1e-9, 4.74e3, true),
    cell(1e5, 24, 1e-9, 1.96e4, true),
    cell(1e5, 6, 1e-9, 4.70e5, true),
];

/// The tightest Euler–Maclaurin reference reachable at `s`, aiming for `target`.
pub fn reference_for(s: Complex64, target: f64) -> Result<OracleResult> {
    let mut goal = target;
    loop {
        match reference_zeta(s, goal) {
            Err(Error::PrecisionUnreachable { .. }) if goal < 1e-6 => goal *= 10.0,
            other => return other,
        }
    }
}

fn model_error(fc: &FilterCoefficients, sw: &SeriesWeights, s: Complex64, n: u64) -> Option<f64> {
    predicted_error(fc, sw, s, n)
        .ok()
        .map(|e| e.predicted_error)
}

/// Single evaluation with measured and predicted error where available.
pub fn eval_row(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    n: u64,
    opts: EvalOptions,
) -> Result<ExperimentRow> {
    let e = zeta_estimate(fc, sw, s, n, opts)?;
    let mut row = ExperimentRow {
        m: fc.modulus().m(),
        t: s.im,
        sigma: s.re,
        n,
        target: None,
        value_re: None,
        value_im: None,
        abs_error: None,
        predicted_error: None,
        status: RowStatus::DenominatorNearZero,
    };
    if let Some(z) = e.zeta_estimate {
        row.value_re = Some(z.re);
        row.value_im = Some(z.im);
        row.status = RowStatus::Ok;
        row.predicted_error = model_error(fc, sw, s, n);
        if let Ok(r) = reference_for(s, 1e-12) {
            row.abs_error = Some((z - r.value).norm());
        }
    }
    Ok(row)
}

/// Error at every grid point.
pub fn curve_rows(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    s: Complex64,
    grid: NGrid,
    opts: EvalOptions,
) -> Result<Vec<ExperimentRow>> {
    let reference = reference_for(s, 1e-12)?;
    let m = fc.modulus().m();
    Ok(error_curve(fc, sw, s, &reference, grid, opts)?
        .into_iter()
        .map(|p| ExperimentRow {
            m,
            t: s.im,
            sigma: s.re,
            n: p.n,
            target: None,
            value_re: Some(p.estimate.re),
            value_im: Some(p.estimate.im),
            abs_error: Some(p.abs_error),
            predicted_error: model_error(fc, sw, s, p.n),
            status: RowStatus::Ok,
        })
        .collect())
}

/// Minimum `N` per target at `s = 1/2 + it`.
pub fn min_n_rows(
    fc: &FilterCoefficients,
    sw: &SeriesWeights,
    t: f64,
    targets: &[f64],
    grid: NGrid,
    opts: EvalOptions,
) -> Result<Vec<ExperimentRow>> {
    let s = Complex64::new(0.5, t);
    let tightest = targets.iter().copied().fold(f64::INFINITY, f64::min);
    let reference = reference_for(s, tightest / 100.0)?;
    let m = fc.modulus().m();
    Ok(empirical_min_n(fc, sw, s, targets, &reference, grid, opts)?
        .into_iter()
        .map(|o| ExperimentRow {
            m,
            t,
            sigma: 0.5,
            n: o.n,
            target: Some(o.target),
            value_re: Some(o.estimate.re),
            value_im: Some(o.estimate.im),
            abs_error: Some(o.abs_error),
            predicted_error: model_error(fc, sw, s, o.n),
            status: match o.status {
                MinNStatus::Found => RowStatus::Ok,
                MinNStatus::Exhausted => RowStatus::Exhausted,
            },
        })
        .collect())
}
