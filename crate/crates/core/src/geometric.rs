//! Per-realization geometric approximation of the mutual information.
//!
//! The eigenvalue log terms are replaced by the midpoint of a secant through
//! `μ ± δ` on the curve `log₂(1 + ρx/L_t)`, with `δ²` the eigenvalue variance
//! of the Gram matrix.

use std::f64::consts::LOG2_E;

use nalgebra::DMatrix;

use crate::channel::{trace_j_squared, SelectionOutcome, C64};
use crate::error::{Error, Result};

/// Scalars of the geometric approximation for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricTerms {
    /// `tr J / L`
    pub mu: f64,
    /// `ρ / (L_t + ρμ)`
    pub kappa: f64,
    /// `tr(J²)/L − (tr J)²/L²`
    pub delta_sq: f64,
    pub l: usize,
}

impl GeometricTerms {
    /// Builds the terms from `tr J` and `tr(J²)`.
    pub fn from_traces(trace_j: f64, trace_j_sq: f64, l: usize, rho: f64, l_t: usize) -> Self {
        let lf = l as f64;
        let mu = trace_j / lf;
        let delta_sq = (trace_j_sq / lf - mu * mu).max(0.0);
        let kappa = rho / (l_t as f64 + rho * mu);
        GeometricTerms { mu, kappa, delta_sq, l }
    }

    pub fn delta(&self) -> f64 {
        self.delta_sq.sqrt()
    }

    /// `tr(Δ²)` with `Δ = J − μI`.
    pub fn trace_delta_sq(&self) -> f64 {
        self.l as f64 * self.delta_sq
    }

    /// Secant-midpoint approximation `(L/2)[log₂(1+ρ(μ−δ)/L_t) + log₂(1+ρ(μ+δ)/L_t)]`.
    pub fn mi_approx(&self, rho: f64, l_t: usize) -> Result<f64> {
        let scale = rho / l_t as f64;
        let delta = self.delta();
        let lower = scale * (self.mu - delta);
        if lower <= -1.0 {
            return Err(Error::Domain(format!(
                "secant endpoint outside the log domain (mu = {}, delta = {delta})",
                self.mu
            )));
        }
        let upper = scale * (self.mu + delta);
        Ok(0.5 * self.l as f64 * (lower.ln_1p() + upper.ln_1p()) * LOG2_E)
    }

    /// Second-order form `L·log₂(1 + ρμ/L_t) − (κ²/2)·tr(Δ²)·log₂e`.
    pub fn second_order_mi(&self, rho: f64, l_t: usize) -> f64 {
        let lead = self.l as f64 * (rho * self.mu / l_t as f64).ln_1p() * LOG2_E;
        lead - 0.5 * self.kappa * self.kappa * self.trace_delta_sq() * LOG2_E
    }
}

pub fn geometric_terms(sel: &SelectionOutcome, rho: f64) -> GeometricTerms {
    GeometricTerms::from_traces(sel.trace_j(), trace_j_squared(sel), sel.l(), rho, sel.l_t())
}

/// `J − μI` for a selection.
pub fn delta_matrix(sel: &SelectionOutcome) -> DMatrix<C64> {
    let l = sel.l();
    let mu = sel.trace_j() / l as f64;
    sel.gram() - DMatrix::<C64>::identity(l, l) * C64::new(mu, 0.0)
}

/// Second-order determinant expansion `1 + κ·trΔ + (κ²/2)[(trΔ)² − tr(Δ²)]`
/// of `|I + κΔ|` for Hermitian `Δ`.
pub fn det_expansion(delta: &DMatrix<C64>, kappa: f64) -> f64 {
    let tr = delta.trace().re;
    let tr_sq: f64 = delta.iter().map(|z| z.norm_sqr()).sum();
    1.0 + kappa * tr + 0.5 * kappa * kappa * (tr * tr - tr_sq)
}

/// Geometric approximation of the mutual information of one realization.
pub fn geometric_mi_approx(sel: &SelectionOutcome, rho: f64) -> Result<f64> {
    geometric_terms(sel, rho).mi_approx(rho, sel.l_t())
}
