//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use tas_capacity::experiment::validate::{
    angle_cos_sq_samples, beta_one_cdf, jensen_gap_estimate, ks_against, expansion_error_ratio, random_hermitian,
    trace_samples, MeanEstimate,
};
use tas_capacity::experiment::{
    run_cdf_experiment, run_ergodic_sweep, run_experiment, run_outage_sweep, simulate_grid, ExperimentKind,
    ExperimentSpec, RunOptions, Sweep,
};
use tas_capacity::stats::ks_critical_value;
use tas_capacity::{
    jensen_gap_limit, proposition_mean_variance, solve_threshold_u, trimmed_sum_stats, EmpiricalDistribution,
    RawConfig, SystemConfig,
};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(n_t: usize, n_r: usize, l_t: usize, rho_db: f64, seed: u64) -> SystemConfig {
    SystemConfig::with_db_snr(n_t, n_r, l_t, rho_db, seed).unwrap()
}

fn opts() -> RunOptions {
    RunOptions::default()
}

fn cdf_ks() -> Outcome {
    let spec = ExperimentSpec::cdf_preset();
    let (report, _) = run_cdf_experiment(&spec, opts()).map_err(|e| e.to_string())?;
    let ks: Vec<f64> = report.points.iter().map(|p| p.ks_distance).collect();
    let last = *ks.last().unwrap();
    let non_increasing = ks.windows(2).all(|w| w[1] <= w[0] + 0.01);
    let detail = format!(
        "KS over n_t {:?} = [{}]; need last <= 0.05 and non-increasing within 0.01",
        report.points.iter().map(|p| p.n_t).collect::<Vec<_>>(),
        ks.iter().map(|k| format!("{k:.4}")).collect::<Vec<_>>().join(", ")
    );
    Ok((last <= 0.05 && non_increasing, detail))
}

fn ergodic_deviation() -> Outcome {
    let mut spec = ExperimentSpec::ergodic_preset();
    spec.trials = Some(10_000);
    let (report, _) = run_ergodic_sweep(&spec, opts()).map_err(|e| e.to_string())?;
    let worst = report
        .points
        .iter()
        .max_by(|a, b| a.rel_deviation_pct.abs().total_cmp(&b.rel_deviation_pct.abs()))
        .unwrap();
    let failing = report.points.iter().filter(|p| p.rel_deviation_pct.abs() > 3.0).count();
    let detail = format!(
        "max |dev| {:.2}% at l_t={} rho={} dB; {failing}/{} points above 3%",
        worst.rel_deviation_pct.abs(),
        worst.l_t,
        worst.rho_db,
        report.points.len()
    );
    Ok((failing == 0, detail))
}

fn outage_deviation() -> Outcome {
    let spec = ExperimentSpec::outage_preset();
    let (report, _) = run_outage_sweep(&spec, opts()).map_err(|e| e.to_string())?;
    let detail = format!(
        "max |dev| paper {:.2}%, standard {:.2}%; matching: {:?}",
        report.max_abs_dev_paper_pct, report.max_abs_dev_standard_pct, report.matching_conventions
    );
    let best = report.max_abs_dev_paper_pct.min(report.max_abs_dev_standard_pct);
    Ok((best <= 2.5 && !report.matching_conventions.is_empty(), detail))
}

fn jensen_gap() -> Outcome {
    let pool = opts().pool().map_err(|e| e.to_string())?;
    let limit = jensen_gap_limit(&cfg(64, 8, 16, 0.0, 1));
    let mut est: Vec<MeanEstimate> = Vec::new();
    for n_t in [64, 256, 1024] {
        est.push(jensen_gap_estimate(&pool, &cfg(n_t, 8, 16, 0.0, 1), 20_000).map_err(|e| e.to_string())?);
    }
    let approaching = est.windows(2).all(|w| {
        let slack = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        (w[1].mean - limit).abs() <= (w[0].mean - limit).abs() + slack
    });
    let rel = (est[2].mean - limit).abs() / limit;
    // how the gap at n_t = 1024 depends on the SNR, for the record
    let mut by_snr = Vec::new();
    for rho_db in [10.0, 20.0, 30.0] {
        let e = jensen_gap_estimate(&pool, &cfg(1024, 8, 16, rho_db, 1), 2_000).map_err(|e| e.to_string())?;
        by_snr.push(format!("{rho_db} dB: {:.4}", e.mean));
    }
    let detail = format!(
        "0 dB gaps [{}] vs {limit:.4}; n_t=1024 off by {:.1}% (need <= 10%); at n_t=1024 {}",
        est.iter().map(|e| format!("{:.4}", e.mean)).collect::<Vec<_>>().join(", "),
        100.0 * rel,
        by_snr.join(", ")
    );
    Ok((approaching && rel <= 0.10, detail))
}

fn boundary_trimmed_sum() -> Outcome {
    let pool = opts().pool().map_err(|e| e.to_string())?;
    let n_t = 16;
    let mut ok = true;
    let mut parts = Vec::new();
    for n_r in [1, 2, 4, 8] {
        let c = cfg(n_t, n_r, n_t, 0.0, 5);
        let s = trimmed_sum_stats(&c).map_err(|e| e.to_string())?;
        let expected = (n_r * n_t) as f64;
        let exact = s.eta_t == expected && s.sigma_t_sq == expected;

        let x = trace_samples(&pool, &c, 10_000);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let var = m2 * n / (n - 1.0);
        let z_mean = (mean - expected) / (var / n).sqrt();
        let z_var = (var - expected) / ((m4 - m2 * m2) / n).sqrt();
        ok &= exact && z_mean.abs() <= 3.0 && z_var.abs() <= 3.0;
        parts.push(format!("n_r={n_r}: z_mean {z_mean:+.2} z_var {z_var:+.2}"));
    }
    Ok((ok, parts.join("; ")))
}

fn single_receiver_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut xi_exact = true;
    for (n_t, l_t) in [(256, 16), (64, 1), (1024, 4), (32, 31), (100, 7)] {
        let c = cfg(n_t, 1, l_t, 0.0, 1);
        let ln = (n_t as f64 / l_t as f64).ln();
        let u = solve_threshold_u(&c).map_err(|e| e.to_string())?;
        let s = trimmed_sum_stats(&c).map_err(|e| e.to_string())?;
        worst = worst.max((u - ln).abs()).max((s.eta_t - l_t as f64 * (1.0 + ln)).abs());
        for rho_db in [-10.0, 0.0, 20.0] {
            let a = proposition_mean_variance(&cfg(n_t, 1, l_t, rho_db, 1)).map_err(|e| e.to_string())?;
            xi_exact &= a.xi == 1.0;
        }
    }
    Ok((worst <= 1e-10 && xi_exact, format!("max abs error {worst:.2e}; xi == 1 exactly: {xi_exact}")))
}

fn expansion_scaling() -> Outcome {
    let ratios: Vec<f64> = (0..100).map(|i| expansion_error_ratio(&random_hermitian(8, 2024, i), 1e-2)).collect();
    let inside = ratios.iter().filter(|r| (6.0..=10.0).contains(*r)).count();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    Ok((inside >= 95, format!("{inside}/100 ratios in [6, 10], median {:.3}", sorted[50])))
}

fn geometric_quality() -> Outcome {
    let pool = opts().pool().map_err(|e| e.to_string())?;
    let c = cfg(128, 8, 16, 0.0, 3);
    let grid = simulate_grid(&pool, c.seed(), 8, 128, &[16], &[1.0], 10_000);
    let mut rel: Vec<f64> = grid
        .records(0, 0)
        .iter()
        .map(|r| r.geometric_mi.map_or(f64::INFINITY, |g| (g - r.exact_mi).abs() / r.exact_mi))
        .collect();
    rel.sort_by(f64::total_cmp);
    let median = 0.5 * (rel[4999] + rel[5000]);

    // single stream: the secant collapses onto the exact value
    let single = simulate_grid(&pool, 9, 1, 64, &[4, 16], &[1.0, 10.0], 2_000);
    let mut worst_l1: f64 = 0.0;
    for li in 0..2 {
        for ri in 0..2 {
            for r in single.records(li, ri) {
                worst_l1 = worst_l1.max((r.geometric_mi.unwrap() - r.exact_mi).abs());
            }
        }
    }
    Ok((
        median <= 0.01 && worst_l1 <= 1e-10,
        format!("median relative error {:.4}% (need <= 1%); L=1 max abs error {worst_l1:.1e}", 100.0 * median),
    ))
}

fn angle_statistics() -> Outcome {
    let pool = opts().pool().map_err(|e| e.to_string())?;
    let pairs = 100_000;
    let critical = ks_critical_value(0.01, pairs);
    let mut ok = true;
    let mut parts = Vec::new();
    for n_r in [2, 4, 8] {
        let x = angle_cos_sq_samples(&pool, 11, n_r, pairs);
        let ks = ks_against(&x, |v| beta_one_cdf(v, n_r as f64 - 1.0));
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let dm = (mean - 1.0 / n_r as f64).abs();
        ok &= x.len() == pairs && ks < critical && dm <= 0.005;
        parts.push(format!("n_r={n_r}: KS {ks:.4} mean err {dm:.4}"));
    }
    Ok((ok, format!("{} (critical {critical:.4})", parts.join("; "))))
}

fn hardening() -> Outcome {
    let pool = opts().pool().map_err(|e| e.to_string())?;
    let mut approx = Vec::new();
    let mut mc = Vec::new();
    for n_t in [1 << 7, 1 << 9, 1 << 11, 1 << 13] {
        let c = cfg(n_t, 8, 16, 0.0, 4);
        approx.push(proposition_mean_variance(&c).map_err(|e| e.to_string())?.sigma_sq);
        let grid = simulate_grid(&pool, c.seed(), 8, n_t, &[16], &[1.0], 10_000);
        let d = EmpiricalDistribution::new(grid.exact_mi(0, 0)).map_err(|e| e.to_string())?;
        let v = d.variance().map_err(|e| e.to_string())?;
        mc.push((v, v * (2.0 / (d.count() as f64 - 1.0)).sqrt()));
    }
    let approx_dec = approx.windows(2).all(|w| w[1] < w[0]);
    let mc_dec = mc.windows(2).all(|w| w[1].0 < w[0].0 + 2.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    Ok((
        approx_dec && mc_dec,
        format!("approx sigma^2 [{}]; MC variance [{}]", fmt(&approx), fmt(&mc.iter().map(|m| m.0).collect::<Vec<_>>())),
    ))
}

fn determinism() -> Outcome {
    let mut specs = vec![
        ExperimentSpec::cdf_preset(),
        ExperimentSpec::ergodic_preset(),
        ExperimentSpec::outage_preset(),
        ExperimentSpec::validation_preset(),
    ];
    for (spec, trials) in specs.iter_mut().zip([2_000, 1_000, 500, 200]) {
        spec.trials = Some(trials);
    }
    specs.push(ExperimentSpec {
        kind: ExperimentKind::ErgodicSweep,
        base: RawConfig { n_t: 40, n_r: 3, l_t: 5, rho_db: 2.0, seed: 99 },
        sweep: Sweep { rho_db: Some(vec![-3.0, 7.0]), ..Sweep::default() },
        trials: Some(333),
        output_path: None,
        p_out: None,
        outage_convention: None,
    });
    let mut mismatched = Vec::new();
    for spec in &specs {
        let runs: Vec<_> = [Some(1), Some(3), None]
            .into_iter()
            .map(|threads| run_experiment(spec, RunOptions { threads }))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if runs.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(format!("{:?}", spec.kind));
        }
    }
    Ok((mismatched.is_empty(), format!("{} specs x 3 thread counts; mismatched: {mismatched:?}", specs.len())))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("MI CDF vs Gaussian approximation (KS)", cdf_ks),
        ("ergodic capacity deviation", ergodic_deviation),
        ("outage capacity deviation", outage_deviation),
        ("Jensen gap constant", jensen_gap),
        ("trimmed sum at l_t = n_t", boundary_trimmed_sum),
        ("single receive antenna closed forms", single_receiver_closed_forms),
        ("determinant expansion cubic error", expansion_scaling),
        ("geometric approximation quality", geometric_quality),
        ("Hermitian angle statistics", angle_statistics),
        ("channel hardening trend", hardening),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
