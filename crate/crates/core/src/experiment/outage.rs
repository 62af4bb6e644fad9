use serde::Serialize;

use super::{check_kind, groups, num, report_json, simulate_grid, Artifacts, CsvTable, ExperimentKind, ExperimentSpec, RunOptions};
use crate::asymptotics::proposition_mean_variance;
use crate::capacity::{outage_from_approx, OutageConvention, OutageSpec};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::stats::EmpiricalDistribution;

/// A convention "matches" when its worst deviation stays within this bound.
pub const OUTAGE_MATCH_TOLERANCE_PCT: f64 = 2.5;

#[derive(Debug, Clone, Serialize)]
pub struct OutagePoint {
    pub n_t: usize,
    pub n_r: usize,
    pub l_t: usize,
    pub rho_db: f64,
    pub eta: f64,
    pub sigma_sq: f64,
    /// Rate under the selected convention.
    pub r_out: f64,
    pub r_out_paper: f64,
    pub r_out_standard: f64,
    /// Empirical `(1 − p_out)` quantile.
    pub mc_quantile_upper: f64,
    /// Empirical `p_out` quantile.
    pub mc_quantile_lower: f64,
    pub dev_paper_pct: f64,
    pub dev_standard_pct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutageReport {
    pub p_out: f64,
    pub convention: OutageConvention,
    pub points: Vec<OutagePoint>,
    pub max_abs_dev_paper_pct: f64,
    pub max_abs_dev_standard_pct: f64,
    /// Convention with the smaller worst-case deviation.
    pub best_convention: OutageConvention,
    /// Conventions whose worst deviation is within [`OUTAGE_MATCH_TOLERANCE_PCT`].
    pub matching_conventions: Vec<OutageConvention>,
}

/// Outage capacity under both conventions against empirical quantiles.
pub fn run_outage_sweep(spec: &ExperimentSpec, options: RunOptions) -> Result<(OutageReport, Artifacts)> {
    check_kind(spec, ExperimentKind::OutageSweep)?;
    let groups = groups(spec)?;
    let pool = options.pool()?;
    let trials = spec.trials();
    let p_out = spec.p_out();
    let convention = spec.convention();
    let paper = OutageSpec::new(p_out, OutageConvention::Paper)?;
    let standard = OutageSpec::new(p_out, OutageConvention::Standard)?;

    let mut table = CsvTable::new(
        spec,
        &[
            "n_t", "n_r", "l_t", "rho_db", "p_out", "eta", "sigma_sq", "r_out", "r_out_paper", "r_out_standard",
            "mc_quantile_upper", "mc_quantile_lower", "dev_paper_pct", "dev_standard_pct",
        ],
    )?;
    let mut points = Vec::new();
    for group in &groups {
        let samples = simulate_grid(&pool, spec.base.seed, group.n_r, group.n_t, &group.l_ts, &group.rhos(), trials);
        for (li, &l_t) in group.l_ts.iter().enumerate() {
            for (ri, &rho_db) in group.rho_dbs.iter().enumerate() {
                let cfg = SystemConfig::with_db_snr(group.n_t, group.n_r, l_t, rho_db, spec.base.seed)?;
                let approx = proposition_mean_variance(&cfg)?;
                let r_paper = outage_from_approx(&approx, &paper)?;
                let r_standard = outage_from_approx(&approx, &standard)?;
                let dist = EmpiricalDistribution::new(samples.exact_mi(li, ri))?;
                let q_upper = dist.quantile(1.0 - p_out)?;
                let q_lower = dist.quantile(p_out)?;
                let point = OutagePoint {
                    n_t: group.n_t,
                    n_r: group.n_r,
                    l_t,
                    rho_db,
                    eta: approx.eta,
                    sigma_sq: approx.sigma_sq,
                    r_out: match convention {
                        OutageConvention::Paper => r_paper,
                        OutageConvention::Standard => r_standard,
                    },
                    r_out_paper: r_paper,
                    r_out_standard: r_standard,
                    mc_quantile_upper: q_upper,
                    mc_quantile_lower: q_lower,
                    dev_paper_pct: 100.0 * (r_paper - q_upper) / q_upper,
                    dev_standard_pct: 100.0 * (r_standard - q_lower) / q_lower,
                };
                table.row(&[
                    point.n_t.to_string(),
                    point.n_r.to_string(),
                    l_t.to_string(),
                    num(rho_db),
                    num(p_out),
                    num(point.eta),
                    num(point.sigma_sq),
                    num(point.r_out),
                    num(r_paper),
                    num(r_standard),
                    num(q_upper),
                    num(q_lower),
                    num(point.dev_paper_pct),
                    num(point.dev_standard_pct),
                ]);
                points.push(point);
            }
        }
    }

    let worst = |f: fn(&OutagePoint) -> f64| points.iter().map(|p| f(p).abs()).fold(0.0, f64::max);
    let max_paper = worst(|p| p.dev_paper_pct);
    let max_standard = worst(|p| p.dev_standard_pct);
    let best_convention = if max_paper <= max_standard { OutageConvention::Paper } else { OutageConvention::Standard };
    let matching_conventions = [(OutageConvention::Paper, max_paper), (OutageConvention::Standard, max_standard)]
        .into_iter()
        .filter(|&(_, dev)| dev <= OUTAGE_MATCH_TOLERANCE_PCT)
        .map(|(c, _)| c)
        .collect();
    let report = OutageReport {
        p_out,
        convention,
        points,
        max_abs_dev_paper_pct: max_paper,
        max_abs_dev_standard_pct: max_standard,
        best_convention,
        matching_conventions,
    };
    let artifacts = Artifacts { csv: Some(table.finish()), report: report_json(spec, &report)? };
    Ok((report, artifacts))
}
