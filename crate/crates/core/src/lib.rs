//! Mutual information of Rayleigh MIMO channels under norm-based transmit
//! antenna selection.
//!
//! The library pairs a closed-form Gaussian approximation of the mutual
//! information (built from the limiting law of the trimmed sum of selected
//! column norms) with an exact Monte Carlo simulator used to check it.
//!
//! ```
//! use tas_capacity::{proposition_mean_variance, SystemConfig};
//!
//! let cfg = SystemConfig::with_db_snr(256, 8, 16, 0.0, 1).unwrap();
//! let approx = proposition_mean_variance(&cfg).unwrap();
//! assert!(approx.eta > 10.0 && approx.sigma_sq < 0.1);
//! ```

pub mod asymptotics;
pub mod capacity;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod geometric;
pub mod rng;
pub mod stats;

pub use asymptotics::{
    asymptotic_mean_limit, chi_square_pdf, growth_order_check, jensen_gap_limit, proposition_mean_variance,
    solve_threshold_u, trimmed_sum_stats, GaussianApprox, TrimmedSumStats,
};
pub use capacity::{ergodic_capacity, outage_capacity, OutageConvention, OutageSpec};
pub use channel::{
    exact_mutual_information, hermitian_angles, jensen_upper_bound, sample_channel, select_antennas,
    trace_j_squared, ChannelMatrix, SelectionOutcome,
};
pub use config::{db_to_linear, linear_to_db, RawConfig, SystemConfig};
pub use error::{Error, Result};
pub use geometric::{det_expansion, geometric_mi_approx, geometric_terms, GeometricTerms};
pub use stats::{empirical_cdf, gaussian_cdf, gaussian_quantile, ks_distance, summarize, EmpiricalDistribution};
