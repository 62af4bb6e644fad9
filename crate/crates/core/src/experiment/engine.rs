//! Parallel Monte Carlo over a grid of selection sizes and SNRs.
//!
//! For one `(n_r, n_t)` pair every trial samples its channel once from the
//! stream `(seed, trial)`; all `(l_t, ρ)` grid points are evaluated on that
//! same realization. Results are gathered in trial order.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::channel::{
    jensen_bound_from_trace, mi_from_eigenvalues, strongest_columns, trace_j_squared, ChannelMatrix,
    SelectionOutcome,
};
use crate::geometric::GeometricTerms;
use crate::rng::trial_rng;

/// Per-realization results at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub exact_mi: f64,
    /// `None` when the secant endpoint leaves the log domain.
    pub geometric_mi: Option<f64>,
    pub jensen_bound: f64,
    pub trace_j: f64,
}

/// Runs `f(trial)` for every trial on `pool`, returning results in trial order.
pub fn run_trials<T, F>(pool: &ThreadPool, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

#[derive(Debug, Clone)]
pub struct GridSamples {
    pub n_r: usize,
    pub n_t: usize,
    pub l_ts: Vec<usize>,
    /// Linear SNRs.
    pub rhos: Vec<f64>,
    records: Vec<Vec<TrialRecord>>,
}

impl GridSamples {
    /// All trials at `(l_ts[li], rhos[ri])`, in trial order.
    pub fn records(&self, li: usize, ri: usize) -> &[TrialRecord] {
        &self.records[li * self.rhos.len() + ri]
    }

    pub fn exact_mi(&self, li: usize, ri: usize) -> Vec<f64> {
        self.records(li, ri).iter().map(|r| r.exact_mi).collect()
    }
}

pub fn simulate_grid(
    pool: &ThreadPool,
    seed: u64,
    n_r: usize,
    n_t: usize,
    l_ts: &[usize],
    rhos: &[f64],
    trials: u64,
) -> GridSamples {
    let max_l_t = l_ts.iter().copied().max().unwrap_or(0);
    let per_trial = run_trials(pool, trials, |trial| {
        let h = ChannelMatrix::sample(n_r, n_t, &mut trial_rng(seed, trial));
        let norms = h.column_norms_sq();
        let order = strongest_columns(&norms, max_l_t);
        let mut out = Vec::with_capacity(l_ts.len() * rhos.len());
        for &l_t in l_ts {
            let sel = SelectionOutcome::from_indices(&h, order[..l_t].to_vec(), &norms);
            let eig = sel.eigenvalues();
            let trace_j = sel.trace_j();
            let trace_j_sq = trace_j_squared(&sel);
            for &rho in rhos {
                let terms = GeometricTerms::from_traces(trace_j, trace_j_sq, sel.l(), rho, l_t);
                out.push(TrialRecord {
                    exact_mi: mi_from_eigenvalues(&eig, rho, l_t),
                    geometric_mi: terms.mi_approx(rho, l_t).ok(),
                    jensen_bound: jensen_bound_from_trace(trace_j, rho, l_t, sel.l()),
                    trace_j,
                });
            }
        }
        out
    });

    let points = l_ts.len() * rhos.len();
    let mut records: Vec<Vec<TrialRecord>> = (0..points).map(|_| Vec::with_capacity(trials as usize)).collect();
    for trial in per_trial {
        for (slot, rec) in records.iter_mut().zip(trial) {
            slot.push(rec);
        }
    }
    GridSamples { n_r, n_t, l_ts: l_ts.to_vec(), rhos: rhos.to_vec(), records }
}
