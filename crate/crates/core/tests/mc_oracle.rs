mod common;

use common::cases;
use proptest::prelude::*;
use unli_core::mc::sample_bvn;
use unli_core::rng::derive_seed;
use unli_core::{mc_unli_2d, run_grid, unli_2d, BvnParams, GridSpec};

fn sample_corr(p: &BvnParams, n: u64, seed: u64) -> f64 {
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in sample_bvn(p, n, seed).unwrap() {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let n = n as f64;
    let cov = sxy / n - sx / n * sy / n;
    cov / ((sxx / n - (sx / n).powi(2)) * (syy / n - (sy / n).powi(2))).sqrt()
}

#[test]
fn sampler_correlation() {
    let n = 1_000_000;
    let p = BvnParams::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
    assert!(sample_corr(&p, n, 1).abs() <= 4.0 / (n as f64).sqrt());
    let p = BvnParams::new(0.0, 0.0, 1.0, 1.0, 0.5).unwrap();
    assert!((sample_corr(&p, n, 2) - 0.5).abs() <= 0.004);
    let p = BvnParams::new(3.0, -1.0, 2.0, 0.5, -0.8).unwrap();
    let r = sample_corr(&p, n, 3);
    assert!((r + 0.8).abs() <= 4.0 * (1.0 - 0.64) / (n as f64).sqrt(), "{r}");
}

#[test]
fn sampler_moments() {
    let p = BvnParams::new(3.0, -1.0, 2.0, 0.5, 0.3).unwrap();
    let n = 400_000u64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for (x, y) in sample_bvn(&p, n, 4).unwrap() {
        s1 += x;
        s2 += y;
    }
    let nf = n as f64;
    assert!((s1 / nf - 3.0).abs() <= 4.0 * 2.0 / nf.sqrt());
    assert!((s2 / nf + 1.0).abs() <= 4.0 * 0.5 / nf.sqrt());
}

#[test]
fn reference_monte_carlo_examples() {
    let p = BvnParams::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
    let e = mc_unli_2d(&p, 100_000, 12).unwrap();
    assert!((e.mean - 0.681).abs() <= 4.0 * e.std_error + 5e-4);
    assert!(e.std_error > 0.001 && e.std_error < 0.003);
    let p = BvnParams::new(-2.0, -2.0, 1.0, 1.0, -0.75).unwrap();
    let e = mc_unli_2d(&p, 100_000, 13).unwrap();
    assert!((e.mean - 0.017).abs() <= 4.0 * e.std_error + 5e-4);
}

#[test]
fn standard_error_halves_with_four_times_the_draws() {
    let p = BvnParams::new(0.5, -0.3, 1.2, 0.8, 0.4).unwrap();
    let small = mc_unli_2d(&p, 50_000, 21).unwrap();
    let large = mc_unli_2d(&p, 200_000, 22).unwrap();
    let ratio = small.std_error / large.std_error;
    assert!((ratio - 2.0).abs() <= 0.2, "{ratio}");
}

#[test]
fn estimate_is_at_least_best_sample_mean() {
    let p = BvnParams::new(0.4, 0.1, 1.0, 2.0, -0.3).unwrap();
    let n = 50_000;
    let e = mc_unli_2d(&p, n, 5).unwrap();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (x, y) in sample_bvn(&p, n, 5).unwrap() {
        s1 += x;
        s2 += y;
    }
    let best = (s1 / n as f64).max(s2 / n as f64).max(0.0);
    assert!(e.mean >= best - 4.0 * e.std_error);
}

#[test]
fn grid_rows_equal_independent_serial_evaluation() {
    let grid = GridSpec::default();
    let rows = run_grid(&grid, 500, 77).unwrap();
    let again = run_grid(&grid, 500, 77).unwrap();
    assert_eq!(rows, again);
    for (k, (row, cell)) in rows.iter().zip(grid.cells().unwrap()).enumerate() {
        let e = mc_unli_2d(&cell.params, 500, derive_seed(77, k as u64)).unwrap();
        assert_eq!(row.mc.to_bits(), e.mean.to_bits());
        assert_eq!(row.mc_se.to_bits(), e.std_error.to_bits());
        assert_eq!(row.closed, unli_2d(&cell.params).total);
        assert_eq!(row.diff, row.closed - row.mc);
    }
    assert_ne!(run_grid(&grid, 500, 78).unwrap(), rows);
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn identical_inputs_identical_estimates(seed in any::<u64>(), n in 2u64..5000) {
        let p = BvnParams::new(0.2, -0.1, 1.0, 1.5, 0.6).unwrap();
        let a = mc_unli_2d(&p, n, seed).unwrap();
        let b = mc_unli_2d(&p, n, seed).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a.seed, seed);
        prop_assert_eq!(a.n, n);
    }
}
