//! System configuration shared by every other module.
//!
//! SNR is held in linear units internally. The dB form only exists at the
//! JSON/CLI boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a level in decibels to a linear power ratio.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Unvalidated configuration as it appears in JSON files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub l_t: usize,
    pub rho_db: f64,
    #[serde(default)]
    pub seed: u64,
}

/// A validated antenna configuration.
///
/// `l` and `m` are `min(l_t, n_r)` and `max(l_t, n_r)`, computed once here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    n_t: usize,
    n_r: usize,
    l_t: usize,
    rho: f64,
    rho_db: f64,
    seed: u64,
    l: usize,
    m: usize,
}

impl SystemConfig {
    /// Validates a raw configuration, filling in the derived fields.
    pub fn validate(raw: RawConfig) -> Result<Self> {
        if !raw.rho_db.is_finite() {
            return Err(Error::invalid("rho_db", "must be finite"));
        }
        Self::build(raw.n_t, raw.n_r, raw.l_t, db_to_linear(raw.rho_db), raw.rho_db, raw.seed)
    }

    /// Builds a configuration from a linear SNR.
    pub fn with_linear_snr(n_t: usize, n_r: usize, l_t: usize, rho: f64, seed: u64) -> Result<Self> {
        Self::build(n_t, n_r, l_t, rho, linear_to_db(rho), seed)
    }

    /// Builds a configuration from an SNR in dB.
    pub fn with_db_snr(n_t: usize, n_r: usize, l_t: usize, rho_db: f64, seed: u64) -> Result<Self> {
        Self::validate(RawConfig { n_t, n_r, l_t, rho_db, seed })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::validate(serde_json::from_str(text)?)
    }

    fn build(n_t: usize, n_r: usize, l_t: usize, rho: f64, rho_db: f64, seed: u64) -> Result<Self> {
        if n_t == 0 {
            return Err(Error::invalid("n_t", "must be at least 1"));
        }
        if n_r == 0 {
            return Err(Error::invalid("n_r", "must be at least 1"));
        }
        if l_t == 0 {
            return Err(Error::invalid("l_t", "must be at least 1"));
        }
        if l_t > n_t {
            return Err(Error::invalid("l_t", "l_t > n_t"));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::invalid("rho", "must be positive and finite"));
        }
        Ok(SystemConfig {
            n_t,
            n_r,
            l_t,
            rho,
            rho_db,
            seed,
            l: l_t.min(n_r),
            m: l_t.max(n_r),
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn l_t(&self) -> usize {
        self.l_t
    }

    /// Linear SNR.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_db(&self) -> f64 {
        self.rho_db
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `min(l_t, n_r)`
    pub fn l(&self) -> usize {
        self.l
    }

    /// `max(l_t, n_r)`
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            n_t: self.n_t,
            n_r: self.n_r,
            l_t: self.l_t,
            rho_db: self.rho_db,
            seed: self.seed,
        }
    }
}

impl Serialize for SystemConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SystemConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfig::deserialize(deserializer)?;
        SystemConfig::validate(raw).map_err(serde::de::Error::custom)
    }
}
