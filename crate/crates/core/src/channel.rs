//! Rayleigh channel sampling, norm-based transmit antenna selection, and the
//! exact per-realization quantities the approximations are checked against.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rng::trial_rng;

pub type C64 = Complex<f64>;

/// An `n_r × n_t` channel; column `j` is transmit antenna `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: DMatrix<C64>,
}

impl ChannelMatrix {
    /// Draws i.i.d. CN(0, 1) entries (real and imaginary parts each N(0, 1/2)).
    pub fn sample<R: Rng + ?Sized>(n_r: usize, n_t: usize, rng: &mut R) -> Self {
        let entries = DMatrix::from_fn(n_r, n_t, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        });
        ChannelMatrix { entries }
    }

    pub fn from_matrix(entries: DMatrix<C64>) -> Self {
        ChannelMatrix { entries }
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn n_r(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_t(&self) -> usize {
        self.entries.ncols()
    }

    /// `‖h_j‖²` for every column.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        self.entries
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Debug dump: one CSV row per receive antenna, interleaved `re,im` pairs.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.entries.row_iter() {
            let fields: Vec<String> = row.iter().map(|z| format!("{:e},{:e}", z.re, z.im)).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Samples the channel for trial `trial` of a configuration.
pub fn sample_channel(cfg: &SystemConfig, trial: u64) -> ChannelMatrix {
    let mut rng = trial_rng(cfg.seed(), trial);
    ChannelMatrix::sample(cfg.n_r(), cfg.n_t(), &mut rng)
}

/// Column indices ordered by decreasing squared norm, ties toward the lower
/// index. Only the first `count` entries are produced.
pub fn strongest_columns(norms_sq: &[f64], count: usize) -> Vec<usize> {
    let order = |a: &usize, b: &usize| norms_sq[*b].total_cmp(&norms_sq[*a]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..norms_sq.len()).collect();
    let count = count.min(idx.len());
    if count == 0 {
        return Vec::new();
    }
    if count < idx.len() {
        idx.select_nth_unstable_by(count - 1, order);
        idx.truncate(count);
    }
    idx.sort_unstable_by(order);
    idx
}

/// The selected effective channel and its `L × L` Gram matrix.
#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    indices: Vec<usize>,
    norms_sq: Vec<f64>,
    effective: DMatrix<C64>,
    gram: DMatrix<C64>,
    trace_j: f64,
}

impl SelectionOutcome {
    /// Builds the outcome for an explicit, already ordered set of columns.
    pub fn from_indices(h: &ChannelMatrix, indices: Vec<usize>, all_norms_sq: &[f64]) -> Self {
        let effective = h.entries.select_columns(indices.iter());
        let norms_sq: Vec<f64> = indices.iter().map(|&j| all_norms_sq[j]).collect();
        let gram = if indices.len() <= h.n_r() {
            effective.ad_mul(&effective)
        } else {
            &effective * effective.adjoint()
        };
        let trace_j = norms_sq.iter().sum();
        SelectionOutcome { indices, norms_sq, effective, gram, trace_j }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Squared norms of the selected columns, in selection order.
    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    pub fn effective(&self) -> &DMatrix<C64> {
        &self.effective
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    /// Sum of the selected squared column norms.
    pub fn trace_j(&self) -> f64 {
        self.trace_j
    }

    /// Number of selected antennas.
    pub fn l_t(&self) -> usize {
        self.indices.len()
    }

    /// Dimension of the Gram matrix.
    pub fn l(&self) -> usize {
        self.gram.nrows()
    }

    /// Eigenvalues of the Gram matrix, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.gram.symmetric_eigenvalues().iter().map(|&x| x.max(0.0)).collect()
    }
}

/// Selects the `l_t` columns with the largest squared norms.
pub fn select_antennas(h: &ChannelMatrix, l_t: usize) -> SelectionOutcome {
    let norms = h.column_norms_sq();
    let indices = strongest_columns(&norms, l_t);
    SelectionOutcome::from_indices(h, indices, &norms)
}

/// `Σ log₂(1 + (ρ/L_t) λ)` over the given eigenvalues.
pub fn mi_from_eigenvalues(eigenvalues: &[f64], rho: f64, l_t: usize) -> f64 {
    let scale = rho / l_t as f64;
    eigenvalues.iter().map(|&lam| (scale * lam).ln_1p()).sum::<f64>() * std::f64::consts::LOG2_E
}

/// Exact mutual information `log₂|I + (ρ/L_t) H̃H̃ᴴ|` in bits.
pub fn exact_mutual_information(sel: &SelectionOutcome, rho: f64) -> Result<f64> {
    if sel.gram.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite entry in Gram matrix".into()));
    }
    Ok(mi_from_eigenvalues(&sel.eigenvalues(), rho, sel.l_t()))
}

/// `L·log₂(1 + ρ·trJ/(L_t·L))`
pub fn jensen_bound_from_trace(trace_j: f64, rho: f64, l_t: usize, l: usize) -> f64 {
    let l = l as f64;
    l * (rho * trace_j / (l_t as f64 * l)).ln_1p() * std::f64::consts::LOG2_E
}

/// Jensen upper bound on the mutual information, in bits.
pub fn jensen_upper_bound(sel: &SelectionOutcome, rho: f64) -> f64 {
    jensen_bound_from_trace(sel.trace_j, rho, sel.l_t(), sel.l())
}

/// Pairwise Hermitian angles between the selected columns, in `[0, π/2]`.
pub fn hermitian_angles(sel: &SelectionOutcome) -> Result<DMatrix<f64>> {
    let n = sel.l_t();
    if let Some(pos) = sel.norms_sq.iter().position(|&v| v <= 0.0) {
        return Err(Error::Numeric(format!("selected column {pos} has zero norm")));
    }
    let mut angles = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let theta = cos_sq_angle(sel, a, b).sqrt().min(1.0).acos();
            angles[(a, b)] = theta;
            angles[(b, a)] = theta;
        }
    }
    Ok(angles)
}

/// `cos²θ` between selected columns `a` and `b`.
pub fn cos_sq_angle(sel: &SelectionOutcome, a: usize, b: usize) -> f64 {
    let inner = sel.effective.column(a).dotc(&sel.effective.column(b));
    (inner.norm_sqr() / (sel.norms_sq[a] * sel.norms_sq[b])).min(1.0)
}

/// `tr(J²)`, the squared Frobenius norm of the Hermitian Gram matrix.
pub fn trace_j_squared(sel: &SelectionOutcome) -> f64 {
    sel.gram.iter().map(|z| z.norm_sqr()).sum()
}
