use serde::{Deserialize, Serialize};

use crate::capacity::OutageConvention;
use crate::config::{RawConfig, SystemConfig};
use crate::error::{Error, Result};

pub const DEFAULT_TRIALS: u64 = 20_000;
pub const DEFAULT_VALIDATION_TRIALS: u64 = 10_000;
pub const DEFAULT_P_OUT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CdfCompare,
    ErgodicSweep,
    OutageSweep,
    Validate,
}

impl ExperimentKind {
    pub fn default_trials(self) -> u64 {
        match self {
            ExperimentKind::Validate => DEFAULT_VALIDATION_TRIALS,
            _ => DEFAULT_TRIALS,
        }
    }

    pub fn default_output(self) -> &'static str {
        match self {
            ExperimentKind::CdfCompare => "cdf.csv",
            ExperimentKind::ErgodicSweep => "ergodic.csv",
            ExperimentKind::OutageSweep => "outage.csv",
            ExperimentKind::Validate => "validation.json",
        }
    }
}

/// Parameter lists swept around the base configuration. Absent lists fall
/// back to the base value; present lists must be non-empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_t: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_r: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_t: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_db: Option<Vec<f64>>,
}

impl Sweep {
    fn check_non_empty(&self) -> Result<()> {
        let empty = self.n_t.as_ref().is_some_and(Vec::is_empty)
            || self.n_r.as_ref().is_some_and(Vec::is_empty)
            || self.l_t.as_ref().is_some_and(Vec::is_empty)
            || self.rho_db.as_ref().is_some_and(Vec::is_empty);
        if empty {
            Err(Error::NothingToRun)
        } else {
            Ok(())
        }
    }
}

/// Experiment description as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub base: RawConfig,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outage_convention: Option<OutageConvention>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// CDF comparison at `L_t = 16`, `N_r = 8`, 0 dB over four array sizes.
    pub fn cdf_preset() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::CdfCompare,
            base: RawConfig { n_t: 256, n_r: 8, l_t: 16, rho_db: 0.0, seed: 1 },
            sweep: Sweep { n_t: Some(vec![32, 64, 128, 256]), ..Sweep::default() },
            trials: Some(DEFAULT_TRIALS),
            output_path: None,
            p_out: None,
            outage_convention: None,
        }
    }

    /// Ergodic capacity over SNR for `N_t = 128`, `N_r = 16`.
    pub fn ergodic_preset() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::ErgodicSweep,
            base: RawConfig { n_t: 128, n_r: 16, l_t: 4, rho_db: 0.0, seed: 1 },
            sweep: Sweep {
                l_t: Some(vec![4, 8, 16, 32]),
                rho_db: Some(vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0]),
                ..Sweep::default()
            },
            trials: Some(DEFAULT_TRIALS),
            output_path: None,
            p_out: None,
            outage_convention: None,
        }
    }

    /// 10% outage capacity over `L_t` for `N_t = 128` at 0 dB.
    pub fn outage_preset() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::OutageSweep,
            base: RawConfig { n_t: 128, n_r: 4, l_t: 2, rho_db: 0.0, seed: 1 },
            sweep: Sweep {
                n_r: Some(vec![4, 8, 16, 32]),
                l_t: Some((2..=32).collect()),
                ..Sweep::default()
            },
            trials: Some(DEFAULT_TRIALS),
            output_path: None,
            p_out: Some(DEFAULT_P_OUT),
            outage_convention: None,
        }
    }

    pub fn validation_preset() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Validate,
            base: RawConfig { n_t: 256, n_r: 8, l_t: 16, rho_db: 0.0, seed: 1 },
            sweep: Sweep::default(),
            trials: Some(DEFAULT_VALIDATION_TRIALS),
            output_path: None,
            p_out: None,
            outage_convention: None,
        }
    }

    pub fn preset(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::CdfCompare => Self::cdf_preset(),
            ExperimentKind::ErgodicSweep => Self::ergodic_preset(),
            ExperimentKind::OutageSweep => Self::outage_preset(),
            ExperimentKind::Validate => Self::validation_preset(),
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or_else(|| self.kind.default_trials())
    }

    pub fn p_out(&self) -> f64 {
        self.p_out.unwrap_or(DEFAULT_P_OUT)
    }

    pub fn convention(&self) -> OutageConvention {
        self.outage_convention.unwrap_or_default()
    }

    /// Fills in every defaulted field so the echoed spec is complete.
    pub fn resolved(&self) -> Self {
        let mut spec = self.clone();
        spec.trials = Some(self.trials());
        spec.output_path = Some(
            self.output_path.clone().unwrap_or_else(|| self.kind.default_output().to_owned()),
        );
        if self.kind == ExperimentKind::OutageSweep {
            spec.p_out = Some(self.p_out());
            spec.outage_convention = Some(self.convention());
        }
        spec
    }

    pub fn base_config(&self) -> Result<SystemConfig> {
        SystemConfig::validate(self.base)
    }

    /// Basic checks shared by every kind.
    pub fn check(&self) -> Result<()> {
        self.base_config()?;
        if self.trials() == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        self.sweep.check_non_empty()?;
        if let Some(p) = self.p_out {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid("p_out", "must lie strictly inside (0, 1)"));
            }
        }
        Ok(())
    }

    /// Cartesian grid of configurations, ordered `n_r`, `n_t`, `l_t`, `rho_db`
    /// from outermost to innermost.
    pub fn grid(&self) -> Result<Vec<SystemConfig>> {
        self.check()?;
        let base = self.base;
        let n_rs = self.sweep.n_r.clone().unwrap_or_else(|| vec![base.n_r]);
        let n_ts = self.sweep.n_t.clone().unwrap_or_else(|| vec![base.n_t]);
        let l_ts = self.sweep.l_t.clone().unwrap_or_else(|| vec![base.l_t]);
        let rhos = self.sweep.rho_db.clone().unwrap_or_else(|| vec![base.rho_db]);
        let mut out = Vec::with_capacity(n_rs.len() * n_ts.len() * l_ts.len() * rhos.len());
        for &n_r in &n_rs {
            for &n_t in &n_ts {
                for &l_t in &l_ts {
                    for &rho_db in &rhos {
                        out.push(SystemConfig::validate(RawConfig { n_t, n_r, l_t, rho_db, seed: base.seed })?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve_to_expected_grids() {
        assert_eq!(ExperimentSpec::cdf_preset().grid().unwrap().len(), 4);
        assert_eq!(ExperimentSpec::ergodic_preset().grid().unwrap().len(), 32);
        assert_eq!(ExperimentSpec::outage_preset().grid().unwrap().len(), 124);
    }

    #[test]
    fn empty_sweep_is_nothing_to_run() {
        let mut spec = ExperimentSpec::cdf_preset();
        spec.sweep.n_t = Some(vec![]);
        assert!(matches!(spec.grid(), Err(Error::NothingToRun)));
    }

    #[test]
    fn sweep_values_are_validated() {
        let mut spec = ExperimentSpec::cdf_preset();
        spec.sweep.n_t = Some(vec![8, 32]);
        assert!(matches!(spec.grid(), Err(Error::InvalidConfig { field: "l_t", .. })));
    }

    #[test]
    fn zero_trials_rejected() {
        let mut spec = ExperimentSpec::cdf_preset();
        spec.trials = Some(0);
        assert!(spec.grid().is_err());
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let text = serde_json::to_string(&ExperimentSpec::outage_preset()).unwrap();
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), ExperimentSpec::outage_preset());
        let bad = r#"{"kind":"cdf_compare","base":{"n_t":8,"n_r":2,"l_t":2,"rho_db":0},"colour":1}"#;
        assert!(ExperimentSpec::from_json(bad).is_err());
        let minimal = r#"{"kind":"ergodic_sweep","base":{"n_t":8,"n_r":2,"l_t":2,"rho_db":0}}"#;
        let spec = ExperimentSpec::from_json(minimal).unwrap();
        assert_eq!(spec.trials(), DEFAULT_TRIALS);
        assert_eq!(spec.resolved().output_path.as_deref(), Some("ergodic.csv"));
    }
}
