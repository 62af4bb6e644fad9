//! Ergodic and outage capacity from the Gaussian approximation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{proposition_mean_variance, GaussianApprox};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::stats::gaussian_quantile;

/// Which tail the outage probability refers to.
///
/// `Paper` reads `Pr{I ≤ R} = 1 − p_out` literally, so `R` is the
/// `(1 − p_out)` quantile. `Standard` is the usual `Pr{I ≤ R} = p_out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutageConvention {
    #[default]
    Paper,
    Standard,
}

impl OutageConvention {
    pub const ALL: [OutageConvention; 2] = [OutageConvention::Paper, OutageConvention::Standard];

    /// CDF level at which the rate is read off.
    pub fn cdf_level(self, p_out: f64) -> f64 {
        match self {
            OutageConvention::Paper => 1.0 - p_out,
            OutageConvention::Standard => p_out,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutageConvention::Paper => "paper",
            OutageConvention::Standard => "standard",
        }
    }
}

impl fmt::Display for OutageConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutageConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(OutageConvention::Paper),
            "standard" => Ok(OutageConvention::Standard),
            other => Err(Error::Spec(format!("unknown outage convention {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSpec {
    p_out: f64,
    convention: OutageConvention,
}

impl OutageSpec {
    pub fn new(p_out: f64, convention: OutageConvention) -> Result<Self> {
        if !(p_out > 0.0 && p_out < 1.0) {
            return Err(Error::invalid("p_out", "must lie strictly inside (0, 1)"));
        }
        Ok(OutageSpec { p_out, convention })
    }

    pub fn p_out(&self) -> f64 {
        self.p_out
    }

    pub fn convention(&self) -> OutageConvention {
        self.convention
    }
}

/// Ergodic capacity approximation: the mean `η` of the Gaussian law.
pub fn ergodic_capacity(cfg: &SystemConfig) -> Result<f64> {
    Ok(proposition_mean_variance(cfg)?.eta)
}

pub fn outage_from_approx(approx: &GaussianApprox, spec: &OutageSpec) -> Result<f64> {
    if approx.sigma_sq == 0.0 {
        return Ok(approx.eta);
    }
    gaussian_quantile(spec.convention.cdf_level(spec.p_out), approx.eta, approx.sigma_sq)
}

/// Outage capacity of the Gaussian approximation under the given convention.
pub fn outage_capacity(cfg: &SystemConfig, spec: &OutageSpec) -> Result<f64> {
    outage_from_approx(&proposition_mean_variance(cfg)?, spec)
}
