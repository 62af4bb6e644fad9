use serde::Serialize;

use super::{check_kind, groups, num, report_json, simulate_grid, Artifacts, CsvTable, ExperimentKind, ExperimentSpec, RunOptions};
use crate::capacity::ergodic_capacity;
use crate::config::SystemConfig;
use crate::error::Result;
use crate::stats::EmpiricalDistribution;

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicPoint {
    pub n_t: usize,
    pub n_r: usize,
    pub l_t: usize,
    pub rho_db: f64,
    pub eta_approx: f64,
    pub mc_mean: f64,
    pub mc_stderr: Option<f64>,
    /// `100·(η − mean)/mean`
    pub rel_deviation_pct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicReport {
    pub points: Vec<ErgodicPoint>,
    pub max_abs_deviation_pct: f64,
}

/// Ergodic capacity approximation against the Monte Carlo mean.
pub fn run_ergodic_sweep(spec: &ExperimentSpec, options: RunOptions) -> Result<(ErgodicReport, Artifacts)> {
    check_kind(spec, ExperimentKind::ErgodicSweep)?;
    let groups = groups(spec)?;
    let pool = options.pool()?;
    let trials = spec.trials();

    let mut table = CsvTable::new(
        spec,
        &["n_t", "n_r", "l_t", "rho_db", "eta_approx", "mc_mean", "mc_stderr", "rel_deviation_pct"],
    )?;
    let mut points = Vec::new();
    for group in &groups {
        let samples = simulate_grid(&pool, spec.base.seed, group.n_r, group.n_t, &group.l_ts, &group.rhos(), trials);
        for (li, &l_t) in group.l_ts.iter().enumerate() {
            for (ri, &rho_db) in group.rho_dbs.iter().enumerate() {
                let cfg = SystemConfig::with_db_snr(group.n_t, group.n_r, l_t, rho_db, spec.base.seed)?;
                let eta = ergodic_capacity(&cfg)?;
                let dist = EmpiricalDistribution::new(samples.exact_mi(li, ri))?;
                let mean = dist.mean();
                let stderr = dist.variance().ok().map(|v| (v / dist.count() as f64).sqrt());
                let point = ErgodicPoint {
                    n_t: group.n_t,
                    n_r: group.n_r,
                    l_t,
                    rho_db,
                    eta_approx: eta,
                    mc_mean: mean,
                    mc_stderr: stderr,
                    rel_deviation_pct: 100.0 * (eta - mean) / mean,
                };
                table.row(&[
                    point.n_t.to_string(),
                    point.n_r.to_string(),
                    l_t.to_string(),
                    num(rho_db),
                    num(eta),
                    num(mean),
                    num(stderr.unwrap_or(f64::NAN)),
                    num(point.rel_deviation_pct),
                ]);
                points.push(point);
            }
        }
    }
    let max_abs_deviation_pct = points.iter().map(|p| p.rel_deviation_pct.abs()).fold(0.0, f64::max);
    let report = ErgodicReport { points, max_abs_deviation_pct };
    let artifacts = Artifacts { csv: Some(table.finish()), report: report_json(spec, &report)? };
    Ok((report, artifacts))
}
