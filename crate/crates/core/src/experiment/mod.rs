//! Experiment harness: cdf comparison, ergodic and outage sweeps, and the
//! validation suite. Each run produces a CSV table (except `validate`) and a
//! JSON report that echoes the resolved spec.

mod cdf;
mod engine;
mod ergodic;
mod outage;
mod spec;
pub mod validate;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::{ThreadPool, ThreadPoolBuilder};
use serde::Serialize;

use crate::config::db_to_linear;
use crate::error::{Error, Result};

pub use cdf::{run_cdf_experiment, CdfPoint, CdfReport, CDF_GRID_POINTS};
pub use engine::{run_trials, simulate_grid, GridSamples, TrialRecord};
pub use ergodic::{run_ergodic_sweep, ErgodicPoint, ErgodicReport};
pub use outage::{run_outage_sweep, OutagePoint, OutageReport, OUTAGE_MATCH_TOLERANCE_PCT};
pub use spec::{
    ExperimentKind, ExperimentSpec, Sweep, DEFAULT_P_OUT, DEFAULT_TRIALS, DEFAULT_VALIDATION_TRIALS,
};
pub use validate::{
    run_validation_suite, CheckResult, ValidationOptions, ValidationReport, ANGLE_PAIRS, EXPANSION_CASES,
};

pub const TOOL_NAME: &str = "tas-capacity";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Execution settings that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn pool(&self) -> Result<ThreadPool> {
        let mut builder = ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Error::invalid("threads", "must be at least 1"));
            }
            builder = builder.num_threads(n);
        }
        builder.build().map_err(|e| Error::Spec(format!("cannot build worker pool: {e}")))
    }
}

/// Files produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: Option<String>,
    pub report: String,
}

impl Artifacts {
    /// Where the JSON report goes when a CSV is written to `out`.
    pub fn report_path(out: &Path) -> PathBuf {
        if out.extension().is_some_and(|e| e == "json") {
            out.with_extension("report.json")
        } else {
            out.with_extension("json")
        }
    }

    /// Writes the main artifact to `out` and, for CSV runs, the report next to it.
    /// Returns every path written.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        match &self.csv {
            Some(csv) => {
                fs::write(out, csv)?;
                let report = Self::report_path(out);
                fs::write(&report, &self.report)?;
                Ok(vec![out.to_path_buf(), report])
            }
            None => {
                fs::write(out, &self.report)?;
                Ok(vec![out.to_path_buf()])
            }
        }
    }
}

/// Runs whatever kind of experiment `spec` describes.
pub fn run_experiment(spec: &ExperimentSpec, options: RunOptions) -> Result<Artifacts> {
    match spec.kind {
        ExperimentKind::CdfCompare => run_cdf_experiment(spec, options).map(|r| r.1),
        ExperimentKind::ErgodicSweep => run_ergodic_sweep(spec, options).map(|r| r.1),
        ExperimentKind::OutageSweep => run_outage_sweep(spec, options).map(|r| r.1),
        ExperimentKind::Validate => {
            run_validation_suite(spec, options, ValidationOptions::default()).map(|r| r.1)
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    spec: &'a ExperimentSpec,
    #[serde(flatten)]
    body: &'a T,
}

pub(crate) fn report_json<T: Serialize>(spec: &ExperimentSpec, body: &T) -> Result<String> {
    let resolved = spec.resolved();
    let env = Envelope { tool: TOOL_NAME, version: VERSION, spec: &resolved, body };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    Ok(text)
}

/// CSV with a `#` preamble echoing tool, version and the resolved spec.
pub(crate) struct CsvTable {
    text: String,
}

impl CsvTable {
    pub(crate) fn new(spec: &ExperimentSpec, header: &[&str]) -> Result<Self> {
        let mut text = String::new();
        writeln!(text, "# {TOOL_NAME} {VERSION}").unwrap();
        writeln!(text, "# spec: {}", serde_json::to_string(&spec.resolved())?).unwrap();
        writeln!(text, "{}", header.join(",")).unwrap();
        Ok(CsvTable { text })
    }

    pub(crate) fn row(&mut self, fields: &[String]) {
        writeln!(self.text, "{}", fields.join(",")).unwrap();
    }

    pub(crate) fn finish(self) -> String {
        self.text
    }
}

/// Ten significant digits.
pub(crate) fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        "nan".to_owned()
    }
}

/// Grid points sharing one `(n_r, n_t)` pair, and so one set of channel draws.
#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub n_r: usize,
    pub n_t: usize,
    pub l_ts: Vec<usize>,
    pub rho_dbs: Vec<f64>,
}

impl Group {
    pub fn rhos(&self) -> Vec<f64> {
        self.rho_dbs.iter().map(|&d| db_to_linear(d)).collect()
    }
}

pub(crate) fn groups(spec: &ExperimentSpec) -> Result<Vec<Group>> {
    spec.grid()?;
    let base = spec.base;
    let n_rs = spec.sweep.n_r.clone().unwrap_or_else(|| vec![base.n_r]);
    let n_ts = spec.sweep.n_t.clone().unwrap_or_else(|| vec![base.n_t]);
    let l_ts = spec.sweep.l_t.clone().unwrap_or_else(|| vec![base.l_t]);
    let rho_dbs = spec.sweep.rho_db.clone().unwrap_or_else(|| vec![base.rho_db]);
    let mut out = Vec::new();
    for &n_r in &n_rs {
        for &n_t in &n_ts {
            out.push(Group { n_r, n_t, l_ts: l_ts.clone(), rho_dbs: rho_dbs.clone() });
        }
    }
    Ok(out)
}

pub(crate) fn check_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::Spec(format!("expected kind {kind:?}, got {:?}", spec.kind)));
    }
    Ok(())
}
