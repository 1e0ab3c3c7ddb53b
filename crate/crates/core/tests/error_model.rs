use std::f64::consts::PI;

use proptest::prelude::*;
use zetacont::error_model::{
    critical_line_error, empirical_min_n, error_curve, kappa, measured_truncation_error,
    predict_min_n, predicted_error, rigorous_tail_bound, tail_bound, MinNStatus, NGrid,
};
use zetacont::oracle::zeta_euler_maclaurin;
use zetacont::series_eval::dirichlet_poly;
use zetacont::{default_coefficients, eval_truncated, Complex64, Error, EvalOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn critical_line_model_value_at_table_cell() {
    let (fc, sw) = default_coefficients(6).unwrap();
    let v = critical_line_error(&fc, &sw, 1e5, 67_000).unwrap();
    assert!((v / 0.0911987071633358 - 1.0).abs() < 1e-9, "{v}");
}

#[test]
fn leading_term_models_differ_by_one_over_d_minus_half() {
    for m in [6u64, 24, 60] {
        let (fc, sw) = default_coefficients(m).unwrap();
        let d = fc.modulus().divisor_count() as f64;
        for t in [1e3, 1e4, 1e5] {
            for n in [1_000u64, 10_000, 100_000] {
                let full = predicted_error(&fc, &sw, c(0.5, t), n)
                    .unwrap()
                    .predicted_error;
                let simple = critical_line_error(&fc, &sw, t, n).unwrap();
                let ratio = full / simple * (d - 0.5);
                assert!(
                    (ratio - 1.0).abs() < 0.02,
                    "m = {m}, t = {t}, N = {n}: {ratio}"
                );
            }
        }
    }
}

#[test]
fn kappa_law() {
    assert!((kappa(4, 10.0) - 10f64.powf(2.0 / 7.0)).abs() < 1e-15);
    assert!((kappa(4, 10.0) - 1.9307).abs() < 1e-4);
    assert!((kappa(8, 10.0).powf(7.5) - 10.0).abs() < 1e-12);
    assert!((kappa(12, 6.0) - kappa(12, 2.0) * kappa(12, 3.0)).abs() < 1e-15);
}

#[test]
fn predicted_min_n_follows_kappa() {
    let (fc, sw) = default_coefficients(6).unwrap();
    let s = c(0.5, 1e5);
    let ns: Vec<f64> = [1e-6, 1e-7, 1e-8, 1e-9]
        .iter()
        .map(|&e| predict_min_n(&fc, &sw, s, e).unwrap() as f64)
        .collect();
    for w in ns.windows(2) {
        assert!((w[1] / w[0] / kappa(4, 10.0) - 1.0).abs() < 1e-4, "{ns:?}");
    }
}

#[test]
fn predicted_min_n_inverts_the_model() {
    for m in [6u64, 24, 60] {
        let (fc, sw) = default_coefficients(m).unwrap();
        for (t, target) in [(1e4, 1e-3), (1e5, 1e-5), (3e4, 2e-7)] {
            let n = predict_min_n(&fc, &sw, c(0.5, t), target).unwrap();
            assert!(critical_line_error(&fc, &sw, t, n).unwrap() <= target);
            assert!(critical_line_error(&fc, &sw, t, n - 1).unwrap() > target);
        }
        let s = c(3.0, 4.0);
        let n = predict_min_n(&fc, &sw, s, 1e-12).unwrap();
        assert!(predicted_error(&fc, &sw, s, n).unwrap().predicted_error <= 1e-12);
        assert!(n == 1 || predicted_error(&fc, &sw, s, n - 1).unwrap().predicted_error > 1e-12);
    }
}

#[test]
fn prediction_tracks_measured_error_at_three() {
    let (fc, sw) = default_coefficients(6).unwrap();
    let s = c(3.0, 0.0);
    let poly = dirichlet_poly(&fc, s).norm();
    let measured = measured_truncation_error(&sw, s, 1000).unwrap().norm() / poly;
    let predicted = predicted_error(&fc, &sw, s, 1000).unwrap().predicted_error;
    assert!(
        predicted / measured > 0.1 && predicted / measured < 10.0,
        "{predicted} vs {measured}"
    );
}

#[test]
fn measured_tail_matches_known_value_at_two() {
    let (fc, sw) = default_coefficients(6).unwrap();
    let s = c(2.0, 0.0);
    let full = PI * PI / 6.0 * dirichlet_poly(&fc, s);
    for n in [1u64, 3, 10, 40] {
        let tail = measured_truncation_error(&sw, s, n).unwrap();
        let direct = full - eval_truncated(&sw, s, n, EvalOptions::default()).unwrap();
        assert!(
            (tail - direct).norm() < 1e-15,
            "N = {n}: {tail} vs {direct}"
        );
    }
}

#[test]
fn measured_tail_matches_oracle_off_axis() {
    let (fc, sw) = default_coefficients(24).unwrap();
    let s = c(2.0, 30.0);
    let reference = zeta_euler_maclaurin(s, 1e-13).unwrap();
    let full = reference.value * dirichlet_poly(&fc, s);
    for n in [2u64, 5] {
        let tail = measured_truncation_error(&sw, s, n).unwrap();
        let direct = full - eval_truncated(&sw, s, n, EvalOptions::default()).unwrap();
        assert!(
            (tail - direct).norm() < 1e-11,
            "N = {n}: {tail} vs {direct}"
        );
    }
}

#[test]
fn model_preconditions() {
    let (fc, sw) = default_coefficients(2).unwrap();
    assert!(matches!(
        predicted_error(&fc, &sw, c(2.0, 0.0), 10),
        Err(Error::ModelNotApplicable { m: 2, .. })
    ));
    let (fc, sw) = default_coefficients(6).unwrap();
    assert!(matches!(
        predicted_error(&fc, &sw, c(0.0, 0.0), 10),
        Err(Error::DenominatorNearZero { .. })
    ));
    assert!(tail_bound(c(-3.0, 0.0), 10, 6, 4).is_err());
    assert!(tail_bound(c(2.0, 0.0), 0, 6, 4).is_err());
    assert!(critical_line_error(&fc, &sw, 1e4, 0).is_err());
    assert!(predict_min_n(&fc, &sw, c(0.5, 1e4), 0.0).is_err());
    assert!(rigorous_tail_bound(&sw, c(2.0, 1e4), 10).is_err());
    assert!(measured_truncation_error(&sw, c(-3.5, 0.0), 10).is_err());
}

#[test]
fn grid_parsing() {
    let g: NGrid = "10:1e3:10".parse().unwrap();
    assert_eq!(
        (g.start, g.stop, g.step, g.len(), g.last()),
        (10, 1000, 10, 100, 1000)
    );
    let g: NGrid = "5:23:4".parse().unwrap();
    assert_eq!(g.points().collect::<Vec<_>>(), [5, 9, 13, 17, 21]);
    assert!(g.contains(13) && !g.contains(14) && !g.contains(25));
    for bad in [
        "10:100", "0:10:1", "10:5:1", "1:10:0", "1.5:10:1", "a:b:c", "-1:10:1",
    ] {
        assert!(bad.parse::<NGrid>().is_err(), "{bad}");
    }
}

#[test]
fn error_curve_matches_pointwise_evaluation() {
    let (fc, sw) = default_coefficients(24).unwrap();
    let s = c(0.5, 5000.0);
    let reference = zeta_euler_maclaurin(s, 1e-12).unwrap();
    let grid = NGrid::new(50, 650, 150).unwrap();
    let curve = error_curve(&fc, &sw, s, &reference, grid, EvalOptions::parallel()).unwrap();
    assert_eq!(
        curve.iter().map(|p| p.n).collect::<Vec<_>>(),
        [50, 200, 350, 500, 650]
    );
    let poly = dirichlet_poly(&fc, s);
    for p in &curve {
        let direct = eval_truncated(&sw, s, p.n, EvalOptions::default()).unwrap() / poly;
        assert!((p.estimate - direct).norm() < 1e-13 * direct.norm().max(1.0));
        assert!((p.abs_error - (direct - reference.value).norm()).abs() < 1e-13);
    }
}

#[test]
fn empirical_min_n_finds_first_passing_point() {
    let (fc, sw) = default_coefficients(60).unwrap();
    let s = c(0.5, 1e4);
    let reference = zeta_euler_maclaurin(s, 1e-9).unwrap();
    let targets = [1e-3, 1e-5];
    let grid = NGrid::new(10, 2000, 10).unwrap();
    let out = empirical_min_n(
        &fc,
        &sw,
        s,
        &targets,
        &reference,
        grid,
        EvalOptions::default(),
    )
    .unwrap();
    assert!(out.iter().all(|o| o.status == MinNStatus::Found));
    let curve = error_curve(&fc, &sw, s, &reference, grid, EvalOptions::default()).unwrap();
    for o in &out {
        let first = curve.iter().find(|p| p.abs_error < o.target).unwrap();
        assert_eq!(first.n, o.n);
    }
    let short = NGrid::new(10, 50, 10).unwrap();
    let out = empirical_min_n(
        &fc,
        &sw,
        s,
        &targets,
        &reference,
        short,
        EvalOptions::default(),
    )
    .unwrap();
    assert!(out
        .iter()
        .all(|o| o.status == MinNStatus::Exhausted && o.n == 50));
    let coarse = zeta_euler_maclaurin(s, 1e-3).unwrap();
    assert!(empirical_min_n(&fc, &sw, s, &targets, &coarse, grid, EvalOptions::default()).is_err());
    assert!(empirical_min_n(&fc, &sw, s, &[], &reference, grid, EvalOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_bound_decreases_in_n_and_d(re in -1.0f64..4.0, im in -1e5f64..1e5, n in 1u64..1_000_000, pick in 0usize..3) {
        let (m, d) = [(6u64, 4usize), (24, 8), (60, 12)][pick];
        let s = c(re, im);
        let here = tail_bound(s, n, m, d).unwrap();
        prop_assert!(here > 0.0);
        prop_assert!(tail_bound(s, n + 1, m, d).unwrap() < here);
        prop_assert!(tail_bound(s, n, m, d + 1).unwrap() < here);
    }

    #[test]
    fn rigorous_bound_dominates_measured_tail(re in 2.0f64..4.0, im in -30.0f64..30.0, exp in 2.0f64..5.0, pick in 0usize..3) {
        let (_, sw) = default_coefficients([6u64, 24, 60][pick]).unwrap();
        let s = c(re, im);
        let n = 10f64.powf(exp) as u64;
        let measured = measured_truncation_error(&sw, s, n).unwrap().norm();
        prop_assert!(measured < rigorous_tail_bound(&sw, s, n).unwrap());
    }
}
