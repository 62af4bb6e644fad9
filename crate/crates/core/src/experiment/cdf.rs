use serde::Serialize;

use super::{check_kind, groups, num, report_json, simulate_grid, Artifacts, CsvTable, ExperimentKind, ExperimentSpec, RunOptions};
use crate::asymptotics::{proposition_mean_variance, GaussianApprox};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::stats::{gaussian_cdf, ks_distance, EmpiricalDistribution};

/// Points on the `[η − 4σ, η + 4σ]` evaluation grid.
pub const CDF_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, Serialize)]
pub struct CdfPoint {
    pub n_t: usize,
    pub n_r: usize,
    pub l_t: usize,
    pub rho_db: f64,
    pub eta: f64,
    pub sigma_sq: f64,
    pub xi: f64,
    pub sample_mean: f64,
    /// `None` for a single trial.
    pub sample_variance: Option<f64>,
    pub ks_distance: f64,
    pub geometric_failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CdfReport {
    pub points: Vec<CdfPoint>,
}

/// Compares the empirical CDF of the exact mutual information with the
/// Gaussian approximation at every grid point.
pub fn run_cdf_experiment(spec: &ExperimentSpec, options: RunOptions) -> Result<(CdfReport, Artifacts)> {
    check_kind(spec, ExperimentKind::CdfCompare)?;
    let groups = groups(spec)?;
    let pool = options.pool()?;
    let trials = spec.trials();

    let mut table = CsvTable::new(
        spec,
        &["n_t", "n_r", "l_t", "rho_db", "x", "empirical_cdf", "gaussian_cdf", "ks_distance"],
    )?;
    let mut points = Vec::new();
    for group in &groups {
        let samples = simulate_grid(&pool, spec.base.seed, group.n_r, group.n_t, &group.l_ts, &group.rhos(), trials);
        for (li, &l_t) in group.l_ts.iter().enumerate() {
            for (ri, &rho_db) in group.rho_dbs.iter().enumerate() {
                let cfg = SystemConfig::with_db_snr(group.n_t, group.n_r, l_t, rho_db, spec.base.seed)?;
                let approx = proposition_mean_variance(&cfg)?;
                let dist = EmpiricalDistribution::new(samples.exact_mi(li, ri))?;
                let ks = ks_distance(&dist, approx.eta, approx.sigma_sq);
                for x in x_grid(&approx) {
                    table.row(&[
                        group.n_t.to_string(),
                        group.n_r.to_string(),
                        l_t.to_string(),
                        num(rho_db),
                        num(x),
                        num(dist.cdf(x)),
                        num(gaussian_cdf(x, approx.eta, approx.sigma_sq)),
                        num(ks),
                    ]);
                }
                points.push(CdfPoint {
                    n_t: group.n_t,
                    n_r: group.n_r,
                    l_t,
                    rho_db,
                    eta: approx.eta,
                    sigma_sq: approx.sigma_sq,
                    xi: approx.xi,
                    sample_mean: dist.mean(),
                    sample_variance: dist.variance().ok(),
                    ks_distance: ks,
                    geometric_failures: samples.records(li, ri).iter().filter(|r| r.geometric_mi.is_none()).count(),
                });
            }
        }
    }
    let report = CdfReport { points };
    let artifacts = Artifacts { csv: Some(table.finish()), report: report_json(spec, &report)? };
    Ok((report, artifacts))
}

fn x_grid(approx: &GaussianApprox) -> impl Iterator<Item = f64> {
    let lo = approx.eta - 4.0 * approx.sigma();
    let step = 8.0 * approx.sigma() / (CDF_GRID_POINTS - 1) as f64;
    (0..CDF_GRID_POINTS).map(move |i| lo + step * i as f64)
}
