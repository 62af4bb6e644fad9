//! Statistical self-checks of the simulator and the closed forms.

use nalgebra::DMatrix;
use rayon::ThreadPool;
use serde::Serialize;
use serde_json::json;

use super::{check_kind, report_json, run_trials, simulate_grid, Artifacts, ExperimentKind, ExperimentSpec, RunOptions};
use crate::asymptotics::{jensen_gap_limit, gaussian_from_stats, trimmed_sum_stats, xi_factor, GaussianApprox};
use crate::channel::{cos_sq_angle, select_antennas, ChannelMatrix, C64};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometric::det_expansion;
use crate::rng::trial_rng;
use crate::stats::{ks_critical_value, EmpiricalDistribution};

pub const ANGLE_PAIRS: usize = 100_000;
/// Array used for the angle statistics: 8 disjoint selected pairs per draw.
pub const ANGLE_N_T: usize = 32;
pub const ANGLE_L_T: usize = 16;
pub const ANGLE_ALPHA: f64 = 0.01;
pub const ANGLE_MEAN_TOLERANCE: f64 = 0.005;

pub const EXPANSION_CASES: usize = 100;
pub const EXPANSION_MIN_PASSING: usize = 95;
pub const EXPANSION_KAPPA: f64 = 1e-2;
pub const EXPANSION_RATIO_RANGE: (f64, f64) = (6.0, 10.0);

pub const TRIMMED_SUM_TOLERANCE: f64 = 0.03;
/// Sample-variance noise at 10⁴ draws is already ~2%; tr J is cheap, so this
/// check never uses fewer draws than this.
pub const TRIMMED_SUM_MIN_TRIALS: u64 = 20_000;
pub const GAUSSIAN_MEAN_TOLERANCE: f64 = 0.03;
pub const VARIANCE_RATIO_RANGE: (f64, f64) = (0.5, 2.0);

pub const DEFAULT_JENSEN_SEQUENCE: [usize; 3] = [64, 256, 1024];
pub const DEFAULT_HARDENING_SEQUENCE: [usize; 4] = [128, 512, 2048, 8192];
pub const DEFAULT_ANGLE_RECEIVERS: [usize; 3] = [2, 4, 8];

/// Test hooks for the suite.
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Replaces the closed-form `ξ` in every Gaussian approximation.
    pub xi_override: Option<f64>,
}

impl ValidationOptions {
    fn approx(&self, cfg: &SystemConfig) -> Result<GaussianApprox> {
        let stats = trimmed_sum_stats(cfg)?;
        Ok(match self.xi_override {
            Some(xi) => GaussianApprox::with_xi(cfg, &stats, xi),
            None => gaussian_from_stats(cfg, &stats),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanEstimate {
    fn of(samples: Vec<f64>) -> Result<(Self, f64)> {
        let dist = EmpiricalDistribution::new(samples)?;
        let var = dist.variance()?;
        Ok((MeanEstimate { mean: dist.mean(), stderr: (var / dist.count() as f64).sqrt() }, var))
    }
}

/// Per-stream Jensen gap `log₂(1 + ρ trJ/(L_t L)) − I/L`, averaged over trials.
pub fn jensen_gap_estimate(pool: &ThreadPool, cfg: &SystemConfig, trials: u64) -> Result<MeanEstimate> {
    let samples = simulate_grid(pool, cfg.seed(), cfg.n_r(), cfg.n_t(), &[cfg.l_t()], &[cfg.rho()], trials);
    let l = cfg.l() as f64;
    let gaps = samples.records(0, 0).iter().map(|r| (r.jensen_bound - r.exact_mi) / l).collect();
    Ok(MeanEstimate::of(gaps)?.0)
}

/// `cos²θ` between disjoint selected column pairs `(0,1), (2,3), …`.
pub fn angle_cos_sq_samples(pool: &ThreadPool, seed: u64, n_r: usize, pairs: usize) -> Vec<f64> {
    let per_trial = ANGLE_L_T / 2;
    let trials = pairs.div_ceil(per_trial) as u64;
    let mut out: Vec<f64> = run_trials(pool, trials, |trial| {
        let h = ChannelMatrix::sample(n_r, ANGLE_N_T, &mut trial_rng(seed, trial));
        let sel = select_antennas(&h, ANGLE_L_T);
        (0..per_trial).map(|p| cos_sq_angle(&sel, 2 * p, 2 * p + 1)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    out.truncate(pairs);
    out
}

/// CDF of `Beta(1, b)`.
pub fn beta_one_cdf(x: f64, b: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        1.0 - (1.0 - x).powf(b)
    }
}

/// KS distance between samples and an arbitrary continuous CDF.
pub fn ks_against<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Random Hermitian `(A + Aᴴ)/2` with `A` i.i.d. CN(0, 1).
pub fn random_hermitian(l: usize, seed: u64, index: u64) -> DMatrix<C64> {
    let a = ChannelMatrix::sample(l, l, &mut trial_rng(seed, index)).entries().clone();
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Error ratio `|e(κ)| / |e(κ/2)|` of the second-order determinant expansion.
pub fn expansion_error_ratio(delta: &DMatrix<C64>, kappa: f64) -> f64 {
    let l = delta.nrows();
    let err = |k: f64| {
        let exact = (DMatrix::<C64>::identity(l, l) + delta * C64::new(k, 0.0)).determinant().re;
        (det_expansion(delta, k) - exact).abs()
    };
    err(kappa) / err(kappa / 2.0)
}

/// Exact mutual information for `trials` draws at one configuration.
pub fn mi_samples(pool: &ThreadPool, cfg: &SystemConfig, trials: u64) -> Vec<f64> {
    simulate_grid(pool, cfg.seed(), cfg.n_r(), cfg.n_t(), &[cfg.l_t()], &[cfg.rho()], trials).exact_mi(0, 0)
}

/// `tr J` for `trials` draws; only the column norms are needed.
pub fn trace_samples(pool: &ThreadPool, cfg: &SystemConfig, trials: u64) -> Vec<f64> {
    let (n_r, n_t, l_t, seed) = (cfg.n_r(), cfg.n_t(), cfg.l_t(), cfg.seed());
    run_trials(pool, trials, |trial| {
        let h = ChannelMatrix::sample(n_r, n_t, &mut trial_rng(seed, trial));
        let mut norms = h.column_norms_sq();
        norms.sort_unstable_by(|a, b| b.total_cmp(a));
        norms[..l_t].iter().sum()
    })
}

fn seq_configs(base: &SystemConfig, n_ts: &[usize]) -> Result<Vec<SystemConfig>> {
    n_ts.iter()
        .map(|&n_t| SystemConfig::with_linear_snr(n_t, base.n_r(), base.l_t(), base.rho(), base.seed()))
        .collect()
}

fn check_jensen_gap(pool: &ThreadPool, base: &SystemConfig, n_ts: &[usize], trials: u64) -> Result<CheckResult> {
    let limit = jensen_gap_limit(base);
    let mut estimates = Vec::new();
    for cfg in seq_configs(base, n_ts)? {
        estimates.push(jensen_gap_estimate(pool, &cfg, trials)?);
    }
    // distance to the constant must not grow beyond sampling noise
    let approaching = estimates.windows(2).all(|w| {
        let slack = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        (w[1].mean - limit).abs() <= (w[0].mean - limit).abs() + slack
    });
    let last = estimates.last().expect("non-empty sequence");
    Ok(CheckResult {
        name: "jensen_gap_convergence",
        passed: approaching,
        details: json!({
            "n_t": n_ts,
            "limit_bits": limit,
            "estimates": estimates,
            "last_relative_error": (last.mean - limit).abs() / limit,
        }),
    })
}

fn check_angles(pool: &ThreadPool, seed: u64, receivers: &[usize]) -> Result<CheckResult> {
    let critical = ks_critical_value(ANGLE_ALPHA, ANGLE_PAIRS);
    let mut passed = true;
    let mut rows = Vec::new();
    for &n_r in receivers {
        if n_r < 2 {
            return Err(Error::invalid("n_r", "angle statistics need at least two receive antennas"));
        }
        let samples = angle_cos_sq_samples(pool, seed, n_r, ANGLE_PAIRS);
        let b = n_r as f64 - 1.0;
        let ks = ks_against(&samples, |x| beta_one_cdf(x, b));
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let ok = ks < critical && (mean - 1.0 / n_r as f64).abs() <= ANGLE_MEAN_TOLERANCE;
        passed &= ok;
        rows.push(json!({ "n_r": n_r, "ks": ks, "mean_cos_sq": mean, "expected_mean": 1.0 / n_r as f64, "passed": ok }));
    }
    Ok(CheckResult {
        name: "angle_beta_ks",
        passed,
        details: json!({ "pairs": ANGLE_PAIRS, "alpha": ANGLE_ALPHA, "critical_value": critical, "receivers": rows }),
    })
}

fn check_trimmed_sum(pool: &ThreadPool, base: &SystemConfig, trials: u64) -> Result<CheckResult> {
    let stats = trimmed_sum_stats(base)?;
    let trials = trials.max(TRIMMED_SUM_MIN_TRIALS);
    let (est, var) = MeanEstimate::of(trace_samples(pool, base, trials))?;
    let mean_err = (stats.eta_t - est.mean).abs() / est.mean;
    let var_err = (stats.sigma_t_sq - var).abs() / var;
    Ok(CheckResult {
        name: "trimmed_sum_agreement",
        passed: mean_err <= TRIMMED_SUM_TOLERANCE && var_err <= TRIMMED_SUM_TOLERANCE,
        details: json!({
            "eta_t": stats.eta_t,
            "sigma_t_sq": stats.sigma_t_sq,
            "sample_mean": est.mean,
            "sample_variance": var,
            "mean_relative_error": mean_err,
            "variance_relative_error": var_err,
            "tolerance": TRIMMED_SUM_TOLERANCE,
            "trials": trials,
        }),
    })
}

fn check_expansion(seed: u64, l: usize) -> CheckResult {
    let ratios: Vec<f64> = (0..EXPANSION_CASES as u64)
        .map(|i| expansion_error_ratio(&random_hermitian(l, seed, i), EXPANSION_KAPPA))
        .collect();
    let (lo, hi) = EXPANSION_RATIO_RANGE;
    let inside = ratios.iter().filter(|r| (lo..=hi).contains(*r)).count();
    CheckResult {
        name: "expansion_cubic_scaling",
        passed: inside >= EXPANSION_MIN_PASSING,
        details: json!({ "l": l, "kappa": EXPANSION_KAPPA, "cases": EXPANSION_CASES, "inside_range": inside, "range": [lo, hi] }),
    }
}

fn check_hardening(
    pool: &ThreadPool,
    base: &SystemConfig,
    n_ts: &[usize],
    trials: u64,
    options: &ValidationOptions,
) -> Result<CheckResult> {
    let mut approx_var = Vec::new();
    let mut mc_var = Vec::new();
    let mut mc_se = Vec::new();
    for cfg in seq_configs(base, n_ts)? {
        approx_var.push(options.approx(&cfg)?.sigma_sq);
        let dist = EmpiricalDistribution::new(mi_samples(pool, &cfg, trials))?;
        let v = dist.variance()?;
        mc_var.push(v);
        mc_se.push(v * (2.0 / (dist.count() as f64 - 1.0)).sqrt());
    }
    let approx_decreasing = approx_var.windows(2).all(|w| w[1] < w[0]);
    let mc_decreasing = (1..mc_var.len())
        .all(|i| mc_var[i] < mc_var[i - 1] + 2.0 * (mc_se[i].powi(2) + mc_se[i - 1].powi(2)).sqrt());
    Ok(CheckResult {
        name: "hardening_trend",
        passed: approx_decreasing && mc_decreasing,
        details: json!({
            "n_t": n_ts,
            "approx_sigma_sq": approx_var,
            "mc_variance": mc_var,
            "mc_variance_stderr": mc_se,
            "approx_decreasing": approx_decreasing,
            "mc_decreasing": mc_decreasing,
        }),
    })
}

fn check_gaussian(
    pool: &ThreadPool,
    base: &SystemConfig,
    trials: u64,
    options: &ValidationOptions,
) -> Result<CheckResult> {
    let approx = options.approx(base)?;
    let (est, var) = MeanEstimate::of(mi_samples(pool, base, trials))?;
    let mean_err = (approx.eta - est.mean).abs() / est.mean;
    let ratio = approx.sigma_sq / var;
    let (lo, hi) = VARIANCE_RATIO_RANGE;
    Ok(CheckResult {
        name: "gaussian_vs_monte_carlo",
        passed: mean_err <= GAUSSIAN_MEAN_TOLERANCE && (lo..=hi).contains(&ratio),
        details: json!({
            "eta": approx.eta,
            "sigma_sq": approx.sigma_sq,
            "xi": approx.xi,
            "closed_form_xi": xi_factor(base, trimmed_sum_stats(base)?.eta_t),
            "sample_mean": est.mean,
            "sample_variance": var,
            "mean_relative_error": mean_err,
            "variance_ratio": ratio,
        }),
    })
}

/// Runs every check. `sweep.n_t` replaces both the Jensen-gap and hardening
/// sequences; `sweep.n_r` replaces the angle-statistics receiver counts.
pub fn run_validation_suite(
    spec: &ExperimentSpec,
    options: RunOptions,
    hooks: ValidationOptions,
) -> Result<(ValidationReport, Artifacts)> {
    check_kind(spec, ExperimentKind::Validate)?;
    spec.check()?;
    if spec.sweep.l_t.is_some() || spec.sweep.rho_db.is_some() {
        return Err(Error::Spec("validate only sweeps n_t and n_r".into()));
    }
    let base = spec.base_config()?;
    let trials = spec.trials();
    if trials < 2 {
        return Err(Error::invalid("trials", "validation needs at least two trials"));
    }
    let pool = options.pool()?;
    let jensen_seq = spec.sweep.n_t.clone().unwrap_or_else(|| DEFAULT_JENSEN_SEQUENCE.to_vec());
    let hardening_seq = spec.sweep.n_t.clone().unwrap_or_else(|| DEFAULT_HARDENING_SEQUENCE.to_vec());
    let receivers = spec.sweep.n_r.clone().unwrap_or_else(|| DEFAULT_ANGLE_RECEIVERS.to_vec());

    let checks = vec![
        check_gaussian(&pool, &base, trials, &hooks)?,
        check_jensen_gap(&pool, &base, &jensen_seq, trials)?,
        check_angles(&pool, base.seed(), &receivers)?,
        check_trimmed_sum(&pool, &base, trials)?,
        check_expansion(base.seed(), base.l()),
        check_hardening(&pool, &base, &hardening_seq, trials, &hooks)?,
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    let report = ValidationReport { checks, all_passed };
    let artifacts = Artifacts { csv: None, report: report_json(spec, &report)? };
    Ok((report, artifacts))
}
