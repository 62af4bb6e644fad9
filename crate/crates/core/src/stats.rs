//! Gaussian CDF and quantile, empirical distributions, and the KS distance.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Standard normal CDF.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `Pr{X ≤ x}` for `X ~ N(eta, sigma_sq)`; a unit step at `eta` when `sigma_sq = 0`.
pub fn gaussian_cdf(x: f64, eta: f64, sigma_sq: f64) -> f64 {
    if sigma_sq > 0.0 {
        standard_normal_cdf((x - eta) / sigma_sq.sqrt())
    } else if x >= eta {
        1.0
    } else {
        0.0
    }
}

/// `Pr{X < x}`, the left limit of [`gaussian_cdf`].
fn gaussian_cdf_left(x: f64, eta: f64, sigma_sq: f64) -> f64 {
    if sigma_sq > 0.0 {
        gaussian_cdf(x, eta, sigma_sq)
    } else if x > eta {
        1.0
    } else {
        0.0
    }
}

/// Standard normal quantile by bisection of the CDF.
pub fn standard_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let c = standard_normal_cdf(mid);
        if c == p {
            return Ok(mid);
        }
        if c < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Quantile of `N(eta, sigma_sq)`.
pub fn gaussian_quantile(p: f64, eta: f64, sigma_sq: f64) -> Result<f64> {
    if sigma_sq < 0.0 {
        return Err(Error::Domain(format!("negative variance {sigma_sq}")));
    }
    let z = standard_normal_quantile(p)?;
    Ok(eta + sigma_sq.sqrt() * z)
}

/// Sorted sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empirical distribution needs at least one sample".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite sample".into()));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of samples `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.count() as f64
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.samples.iter().copied()) / self.count() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> Result<f64> {
        let n = self.count();
        if n < 2 {
            return Err(Error::Domain("variance needs at least two samples".into()));
        }
        let mean = self.mean();
        Ok(neumaier_sum(self.samples.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64)
    }

    /// Linear interpolation between order statistics at rank `(n−1)p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let h = (self.count() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        let (a, b) = (self.samples[lo], self.samples[hi]);
        Ok(a + (h - lo as f64) * (b - a))
    }
}

pub fn empirical_cdf(dist: &EmpiricalDistribution, x: f64) -> f64 {
    dist.cdf(x)
}

/// Kolmogorov–Smirnov distance between the empirical law and `N(eta, sigma_sq)`.
pub fn ks_distance(dist: &EmpiricalDistribution, eta: f64, sigma_sq: f64) -> f64 {
    let n = dist.count() as f64;
    let s = dist.samples();
    let mut d = 0.0f64;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        let mut j = i;
        while j < s.len() && s[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((below - gaussian_cdf_left(x, eta, sigma_sq)).abs());
        d = d.max((at - gaussian_cdf(x, eta, sigma_sq)).abs());
        i = j;
    }
    if sigma_sq <= 0.0 {
        // the model jumps at eta, which may sit between samples
        let fn_eta = dist.cdf(eta);
        let below = s.partition_point(|&v| v < eta) as f64 / n;
        d = d.max(below).max(1.0 - fn_eta);
    }
    d.clamp(0.0, 1.0)
}

/// Asymptotic two-sided critical value of the one-sample KS statistic.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// `(p, quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
}

/// Default probabilities reported by [`summarize`].
pub const SUMMARY_PROBABILITIES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

pub fn summarize(dist: &EmpiricalDistribution) -> Result<Summary> {
    let variance = dist.variance()?;
    let quantiles = SUMMARY_PROBABILITIES
        .iter()
        .map(|&p| Ok((p, dist.quantile(p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary { count: dist.count(), mean: dist.mean(), variance, quantiles })
}
