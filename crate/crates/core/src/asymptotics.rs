//! Large-system statistics of the trimmed sum `tr J` and the resulting
//! Gaussian approximation of the mutual information.
//!
//! The squared column norms are unit-scale gamma variables with integer shape
//! `N_r`, so the tail integral reduces to a finite Poisson sum.

use std::f64::consts::LOG2_E;

use serde::Serialize;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::stats::neumaier_sum;

/// Residual tolerance of the threshold equation.
pub const THRESHOLD_TOLERANCE: f64 = 1e-12;

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Unit-scale gamma density with integer shape `k`: `x^{k−1}e^{−x}/(k−1)!`.
pub fn chi_square_pdf(x: f64, k: u32) -> f64 {
    assert!(k >= 1, "shape must be positive");
    if x < 0.0 {
        0.0
    } else if x == 0.0 {
        if k == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        ((k - 1) as f64 * x.ln() - x - ln_factorial(k - 1)).exp()
    }
}

/// Regularized upper incomplete gamma `Q(k, u) = e^{−u} Σ_{j<k} u^j/j!`.
pub fn upper_gamma_regularized(k: u32, u: f64) -> f64 {
    assert!(k >= 1, "shape must be positive");
    if u <= 0.0 {
        return 1.0;
    }
    let ln_u = u.ln();
    let mut log_term = -u;
    let terms = (0..k).map(|j| {
        if j > 0 {
            log_term += ln_u - (j as f64).ln();
        }
        log_term.exp()
    });
    neumaier_sum(terms)
}

fn shape(cfg: &SystemConfig) -> u32 {
    u32::try_from(cfg.n_r()).expect("receive antenna count fits in u32")
}

/// Solves `Q(N_r, u) = L_t/N_t` for the selection threshold `u`.
pub fn solve_threshold_u(cfg: &SystemConfig) -> Result<f64> {
    if cfg.l_t() == cfg.n_t() {
        return Ok(0.0);
    }
    let k = shape(cfg);
    let target = cfg.l_t() as f64 / cfg.n_t() as f64;
    let residual = |u: f64| upper_gamma_regularized(k, u) - target;

    let mut lo = 0.0;
    let mut hi = k as f64 + 40.0 + 10.0 * (cfg.n_t() as f64).ln();
    while residual(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut best = (f64::INFINITY, lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if r.abs() < best.0 {
            best = (r.abs(), mid);
        }
        if r == 0.0 || hi - lo <= f64::EPSILON * mid {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 > THRESHOLD_TOLERANCE {
        return Err(Error::Solver { residual: best.0 });
    }
    Ok(best.1)
}

/// Mean and variance of the limiting Gaussian law of `tr J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrimmedSumStats {
    pub u: f64,
    pub eta_t: f64,
    pub sigma_t_sq: f64,
    pub xi_t: f64,
}

pub fn trimmed_sum_stats(cfg: &SystemConfig) -> Result<TrimmedSumStats> {
    let n_r = cfg.n_r() as f64;
    let n_t = cfg.n_t() as f64;
    let l_t = cfg.l_t() as f64;

    if cfg.l_t() == cfg.n_t() {
        // the tail densities vanish at u = 0
        return Ok(TrimmedSumStats {
            u: 0.0,
            eta_t: n_r * n_t,
            sigma_t_sq: n_r * n_t,
            xi_t: n_r * (n_r + 1.0) * n_t,
        });
    }

    let u = solve_threshold_u(cfg)?;
    let k = shape(cfg);
    let f1 = chi_square_pdf(u, k + 1);
    let f2 = chi_square_pdf(u, k + 2);
    let eta_t = n_r * (l_t + n_t * f1);
    let xi_t = n_r * (n_r + 1.0) * (l_t + n_t * f1 + n_t * f2);
    let sigma_t_sq = (l_t * u - eta_t).powi(2) * (1.0 / l_t - 1.0 / n_t) - eta_t * eta_t / l_t + xi_t;
    if sigma_t_sq.is_nan() || sigma_t_sq <= 0.0 {
        return Err(Error::Numeric(format!("non-positive trimmed-sum variance {sigma_t_sq}")));
    }
    Ok(TrimmedSumStats { u, eta_t, sigma_t_sq, xi_t })
}

/// Gaussian law `N(eta, sigma_sq)` of the mutual information, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianApprox {
    pub eta: f64,
    pub sigma_sq: f64,
    pub xi: f64,
}

impl GaussianApprox {
    /// Evaluates mean and variance from the trimmed-sum statistics using the
    /// given `ξ`. [`proposition_mean_variance`] supplies the closed-form one.
    pub fn with_xi(cfg: &SystemConfig, stats: &TrimmedSumStats, xi: f64) -> Self {
        let l = cfg.l() as f64;
        let m = cfg.m() as f64;
        let l_t = cfg.l_t() as f64;
        let rho = cfg.rho();
        let eta_t = stats.eta_t;
        let denom = l_t * l + rho * eta_t;

        let lead = (rho * eta_t / (l_t * l)).ln_1p() * LOG2_E;
        let correction = (l - 1.0) * (rho * eta_t).powi(2) * LOG2_E / (2.0 * m * denom * denom);
        let eta = l * (lead - correction);
        let sigma_sq = (xi * l * rho * LOG2_E / denom).powi(2) * stats.sigma_t_sq;
        GaussianApprox { eta, sigma_sq, xi }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }
}

/// `ξ = 1 − L_t·L·(L−1)·ρη_t / (M(L_t·L + ρη_t)²)`
pub fn xi_factor(cfg: &SystemConfig, eta_t: f64) -> f64 {
    let l = cfg.l() as f64;
    let l_t = cfg.l_t() as f64;
    let denom = l_t * l + cfg.rho() * eta_t;
    1.0 - l_t * l * (l - 1.0) * cfg.rho() * eta_t / (cfg.m() as f64 * denom * denom)
}

pub fn gaussian_from_stats(cfg: &SystemConfig, stats: &TrimmedSumStats) -> GaussianApprox {
    GaussianApprox::with_xi(cfg, stats, xi_factor(cfg, stats.eta_t))
}

/// Mean, variance and `ξ` of the Gaussian approximation.
pub fn proposition_mean_variance(cfg: &SystemConfig) -> Result<GaussianApprox> {
    Ok(gaussian_from_stats(cfg, &trimmed_sum_stats(cfg)?))
}

/// Limit of the mean once the variance has vanished.
pub fn asymptotic_mean_limit(cfg: &SystemConfig) -> Result<f64> {
    let stats = trimmed_sum_stats(cfg)?;
    let l = cfg.l() as f64;
    let lead = l * (cfg.rho() * stats.eta_t / (cfg.l_t() as f64 * l)).ln_1p() * LOG2_E;
    Ok(lead - l * (l - 1.0) / (2.0 * cfg.m() as f64) * LOG2_E)
}

/// Limiting per-stream gap `((L−1)/(2M))·log₂e` between the Jensen bound and `I/L`.
pub fn jensen_gap_limit(cfg: &SystemConfig) -> f64 {
    (cfg.l() as f64 - 1.0) / (2.0 * cfg.m() as f64) * LOG2_E
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub n_t: usize,
    pub eta_t: f64,
    pub sigma_t_sq: f64,
    /// `η_t/(N_r L_t) − 1`
    pub eta_excess: f64,
    /// `ln(N_t/L_t)`
    pub log_ratio: f64,
    /// `σ_t²/(N_r L_t)`
    pub sigma_ratio: f64,
}

impl GrowthRow {
    /// `eta_excess / log_ratio`, undefined when `N_t = L_t`.
    pub fn excess_per_log(&self) -> Option<f64> {
        (self.log_ratio > 0.0).then(|| self.eta_excess / self.log_ratio)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub eta_increasing: bool,
    /// Successive changes of `eta_excess / log_ratio` shrink.
    pub excess_ratio_settling: bool,
    /// Every `σ_t²/(N_r L_t)` lies in `(0, N_r + 1)`.
    pub sigma_ratio_below_limit: bool,
}

impl GrowthReport {
    pub fn all_ok(&self) -> bool {
        self.eta_increasing && self.excess_ratio_settling && self.sigma_ratio_below_limit
    }
}

/// Qualitative growth check of `η_t` and `σ_t²` along increasing `N_t`.
pub fn growth_order_check(cfgs: &[SystemConfig]) -> Result<GrowthReport> {
    let Some(first) = cfgs.first() else {
        return Err(Error::NothingToRun);
    };
    for pair in cfgs.windows(2) {
        if pair[1].n_r() != first.n_r() || pair[1].l_t() != first.l_t() {
            return Err(Error::invalid("n_r", "growth sequence must fix n_r and l_t"));
        }
        if pair[1].n_t() <= pair[0].n_t() {
            return Err(Error::invalid("n_t", "growth sequence must strictly increase n_t"));
        }
    }
    let scale = (first.n_r() * first.l_t()) as f64;
    let rows = cfgs
        .iter()
        .map(|cfg| {
            let stats = trimmed_sum_stats(cfg)?;
            Ok(GrowthRow {
                n_t: cfg.n_t(),
                eta_t: stats.eta_t,
                sigma_t_sq: stats.sigma_t_sq,
                eta_excess: stats.eta_t / scale - 1.0,
                log_ratio: (cfg.n_t() as f64 / cfg.l_t() as f64).ln(),
                sigma_ratio: stats.sigma_t_sq / scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let eta_increasing = rows.windows(2).all(|w| w[1].eta_t > w[0].eta_t);
    let ratios: Vec<f64> = rows.iter().filter_map(GrowthRow::excess_per_log).collect();
    let steps: Vec<f64> = ratios.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let excess_ratio_settling = steps.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let limit = first.n_r() as f64 + 1.0;
    let sigma_ratio_below_limit = rows.iter().all(|r| r.sigma_ratio > 0.0 && r.sigma_ratio < limit);
    Ok(GrowthReport { rows, eta_increasing, excess_ratio_settling, sigma_ratio_below_limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_t: usize, n_r: usize, l_t: usize, rho: f64) -> SystemConfig {
        SystemConfig::with_linear_snr(n_t, n_r, l_t, rho, 0).unwrap()
    }

    #[test]
    fn pdf_values() {
        assert_eq!(chi_square_pdf(0.0, 1), 1.0);
        assert!((chi_square_pdf(1.0, 2) - (-1f64).exp()).abs() < 1e-15);
        for k in 1..6 {
            assert_eq!(chi_square_pdf(-0.5, k), 0.0);
        }
        // 3²e^{-3}/2!
        assert!((chi_square_pdf(3.0, 3) - 4.5 * (-3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tail_matches_closed_forms() {
        assert_eq!(upper_gamma_regularized(4, 0.0), 1.0);
        assert!((upper_gamma_regularized(1, 2.0) - (-2f64).exp()).abs() < 1e-16);
        assert!((upper_gamma_regularized(2, 2.0) - 3.0 * (-2f64).exp()).abs() < 1e-16);
        // deep tail stays positive without underflow to garbage
        let q = upper_gamma_regularized(8, 300.0);
        assert!(q > 0.0 && q < 1e-100);
    }

    #[test]
    fn full_selection_threshold_is_zero() {
        assert_eq!(solve_threshold_u(&cfg(16, 4, 16, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn single_receiver_threshold_closed_form() {
        let u = solve_threshold_u(&cfg(256, 1, 16, 1.0)).unwrap();
        assert!((u - 16f64.ln()).abs() < 1e-10, "{u}");
        assert!((u - 2.772589).abs() < 1e-6);
    }

    #[test]
    fn threshold_monotone_in_n_t() {
        let mut prev = -1.0;
        for e in 4..14 {
            let c = cfg(1 << e, 8, 16, 1.0);
            let u = solve_threshold_u(&c).unwrap();
            let residual = upper_gamma_regularized(8, u) - 16.0 / (1u64 << e) as f64;
            assert!(residual.abs() < THRESHOLD_TOLERANCE);
            assert!(u > prev);
            prev = u;
        }
    }

    #[test]
    fn boundary_collapse() {
        for n_r in [1, 2, 4, 8] {
            let s = trimmed_sum_stats(&cfg(32, n_r, 32, 1.0)).unwrap();
            let expected = (n_r * 32) as f64;
            assert_eq!(s.eta_t, expected);
            assert_eq!(s.sigma_t_sq, expected);
        }
    }

    #[test]
    fn single_receiver_mean_closed_form() {
        for (n_t, l_t) in [(256, 16), (64, 4), (1024, 8)] {
            let s = trimmed_sum_stats(&cfg(n_t, 1, l_t, 1.0)).unwrap();
            let lt = l_t as f64;
            let expected = lt * (1.0 + (n_t as f64 / lt).ln());
            assert!((s.eta_t - expected).abs() < 1e-10 * expected);
            // unit exponentials: variance of the top-L_t sum under the same formula
            assert!((s.sigma_t_sq - lt * (2.0 - lt / n_t as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn variance_positive_on_grid() {
        for n_r in [1, 2, 4, 8, 16] {
            for l_e in 0..6 {
                for r_e in 0..=10 {
                    let l_t = 1usize << l_e;
                    let s = trimmed_sum_stats(&cfg(l_t << r_e, n_r, l_t, 1.0)).unwrap();
                    assert!(s.sigma_t_sq > 0.0, "n_r={n_r} l_t={l_t} ratio=2^{r_e}");
                }
            }
        }
    }

    #[test]
    fn single_receiver_xi_is_one() {
        for l_t in [1, 4, 16] {
            let g = proposition_mean_variance(&cfg(256, 1, l_t, 3.0)).unwrap();
            assert_eq!(g.xi, 1.0);
        }
    }

    #[test]
    fn gaussian_formula_reevaluation() {
        let c = cfg(256, 8, 16, 1.0);
        let s = trimmed_sum_stats(&c).unwrap();
        let g = proposition_mean_variance(&c).unwrap();
        // scripted re-evaluation: L = 8, M = 16, L_t·L = 128
        let e = s.eta_t;
        let d = 128.0 + e;
        let log2e = 1.0 / std::f64::consts::LN_2;
        let eta = 8.0 * ((1.0 + e / 128.0).log2() - 7.0 * e * e * log2e / (32.0 * d * d));
        let xi = 1.0 - 128.0 * 7.0 * e / (16.0 * d * d);
        let sigma_sq = (xi * 8.0 * log2e / d).powi(2) * s.sigma_t_sq;
        assert!((g.eta - eta).abs() < 1e-12 * eta);
        assert!((g.xi - xi).abs() < 1e-14);
        assert!((g.sigma_sq - sigma_sq).abs() < 1e-12 * sigma_sq);
    }

    #[test]
    fn mean_below_jensen_lead_term() {
        for n_r in [1, 4, 8, 16] {
            for l_t in [2, 8, 32] {
                for rho in [0.1, 1.0, 100.0] {
                    let c = cfg(128, n_r, l_t, rho);
                    let s = trimmed_sum_stats(&c).unwrap();
                    let l = c.l() as f64;
                    let lead = l * (1.0 + rho * s.eta_t / (l_t as f64 * l)).log2();
                    assert!(gaussian_from_stats(&c, &s).eta <= lead);
                }
            }
        }
    }

    #[test]
    fn xi_and_sigma_limits() {
        let mut prev_xi = 0.0;
        for e in 6..=18 {
            let g = proposition_mean_variance(&cfg(1 << e, 8, 16, 1.0)).unwrap();
            assert!(g.xi > prev_xi);
            prev_xi = g.xi;
        }
        assert!(prev_xi > 0.9);
        let s7 = proposition_mean_variance(&cfg(1 << 7, 8, 16, 1.0)).unwrap().sigma_sq;
        let s14 = proposition_mean_variance(&cfg(1 << 14, 8, 16, 1.0)).unwrap().sigma_sq;
        assert!(s7 >= 2.0 * s14, "{s7} {s14}");
    }

    #[test]
    fn mean_limit_values() {
        let c = cfg(256, 1, 4, 2.0);
        let s = trimmed_sum_stats(&c).unwrap();
        let expected = (1.0 + 2.0 * s.eta_t / 4.0).log2();
        assert_eq!(asymptotic_mean_limit(&c).unwrap(), expected);

        let c = cfg(256, 8, 16, 1.0);
        let s = trimmed_sum_stats(&c).unwrap();
        let lead = 8.0 * (1.0 + s.eta_t / 128.0).log2();
        let subtracted = lead - asymptotic_mean_limit(&c).unwrap();
        assert!((subtracted - 1.75 / std::f64::consts::LN_2).abs() < 1e-12);
        assert!((subtracted - 2.5247).abs() < 1e-4);
    }

    #[test]
    fn mean_converges_to_limit() {
        let mut prev = f64::INFINITY;
        for e in 6..=14 {
            let c = cfg(1 << e, 8, 16, 1.0);
            let gap = (proposition_mean_variance(&c).unwrap().eta - asymptotic_mean_limit(&c).unwrap()).abs();
            assert!(gap < prev);
            prev = gap;
        }
    }

    #[test]
    fn jensen_gap_constant() {
        assert_eq!(jensen_gap_limit(&cfg(64, 1, 8, 1.0)), 0.0);
        assert_eq!(jensen_gap_limit(&cfg(64, 8, 1, 1.0)), 0.0);
        let gap = jensen_gap_limit(&cfg(256, 8, 16, 1.0));
        assert!((gap - 0.3155895).abs() < 1e-6, "{gap}");
    }

    #[test]
    fn growth_single_receiver_exact() {
        let cfgs: Vec<_> = (3..12).map(|e| cfg(1 << e, 1, 4, 1.0)).collect();
        let report = growth_order_check(&cfgs).unwrap();
        for row in &report.rows {
            assert!((row.eta_excess - row.log_ratio).abs() < 1e-10);
        }
        assert!(report.all_ok());
    }

    #[test]
    fn growth_multi_receiver() {
        let cfgs: Vec<_> = (5..=16).map(|e| cfg(1 << e, 8, 16, 1.0)).collect();
        let report = growth_order_check(&cfgs).unwrap();
        assert!(report.eta_increasing);
        assert!(report.sigma_ratio_below_limit);
        let last = report.rows.last().unwrap();
        assert_eq!(last.n_t, 1 << 16);
        assert!(last.sigma_ratio > 0.0 && last.sigma_ratio < 9.0);
    }

    #[test]
    fn growth_rejects_bad_sequences() {
        assert!(matches!(growth_order_check(&[]), Err(Error::NothingToRun)));
        let bad = [cfg(64, 8, 16, 1.0), cfg(32, 8, 16, 1.0)];
        assert!(growth_order_check(&bad).is_err());
        let mixed = [cfg(32, 8, 16, 1.0), cfg(64, 4, 16, 1.0)];
        assert!(growth_order_check(&mixed).is_err());
    }
}
