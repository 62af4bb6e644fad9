use tas_capacity::channel::cos_sq_angle;
use tas_capacity::experiment::RunOptions;
use tas_capacity::experiment::run_trials;
use tas_capacity::{hermitian_angles, sample_channel, select_antennas, trace_j_squared, SystemConfig};

#[test]
fn entries_have_unit_power_and_balanced_parts() {
    let cfg = SystemConfig::with_db_snr(64, 8, 4, 0.0, 21).unwrap();
    let (mut power, mut re2, mut mean_re, mut n) = (0.0, 0.0, 0.0, 0.0);
    for trial in 0..200 {
        for z in sample_channel(&cfg, trial).entries().iter() {
            power += z.norm_sqr();
            re2 += z.re * z.re;
            mean_re += z.re;
            n += 1.0;
        }
    }
    // 102400 entries: sd of the power mean is about 0.003
    assert!((power / n - 1.0).abs() < 0.015, "{}", power / n);
    assert!((re2 / n - 0.5).abs() < 0.01);
    assert!((mean_re / n).abs() < 0.01);
}

#[test]
fn mean_cos_sq_is_inverse_receivers() {
    let pool = RunOptions::default().pool().unwrap();
    let cfg = SystemConfig::with_db_snr(32, 8, 16, 0.0, 4).unwrap();
    // 8 disjoint pairs per draw, 10^5 pairs
    let vals: Vec<f64> = run_trials(&pool, 12_500, |t| {
        let sel = select_antennas(&sample_channel(&cfg, t), 16);
        (0..8).map(|p| cos_sq_angle(&sel, 2 * p, 2 * p + 1)).collect::<Vec<_>>()
    })
    .concat();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    assert!((mean - 0.125).abs() < 0.005, "{mean}");
}

#[test]
fn angles_are_symmetric_and_bounded() {
    let cfg = SystemConfig::with_db_snr(20, 3, 6, 0.0, 8).unwrap();
    let sel = select_antennas(&sample_channel(&cfg, 0), 6);
    let a = hermitian_angles(&sel).unwrap();
    for i in 0..6 {
        assert_eq!(a[(i, i)], 0.0);
        for j in 0..6 {
            assert_eq!(a[(i, j)], a[(j, i)]);
            assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&a[(i, j)]));
        }
    }
}

#[test]
fn trace_ratio_matches_large_array_limit() {
    // tr(J²)/tr(J)² → (N_r + L_t − 1)/(N_r L_t) when the selected norms concentrate
    let pool = RunOptions::default().pool().unwrap();
    let cfg = SystemConfig::with_db_snr(1024, 8, 8, 0.0, 6).unwrap();
    let ratios = run_trials(&pool, 10_000, |t| {
        let sel = select_antennas(&sample_channel(&cfg, t), 8);
        trace_j_squared(&sel) / sel.trace_j().powi(2)
    });
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let expected = 15.0 / 64.0;
    assert!((mean / expected - 1.0).abs() < 0.05, "{mean} vs {expected}");
}
