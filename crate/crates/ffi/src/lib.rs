//! C ABI over `tas-capacity`.
//!
//! Every fallible entry point returns a [`TasStatus`]; on failure a message is
//! kept per thread and can be read with [`tas_last_error_message`]. Handles are
//! opaque and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tas_capacity::{
    exact_mutual_information, geometric_mi_approx, jensen_upper_bound, outage_capacity, proposition_mean_variance,
    sample_channel, select_antennas, trimmed_sum_stats, Error, OutageConvention, OutageSpec, SystemConfig,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Numeric = 3,
    Domain = 4,
    Solver = 5,
    InvalidArgument = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TasOutageConvention {
    /// `R` is the `1 − p_out` quantile.
    Paper = 0,
    /// `R` is the `p_out` quantile.
    Standard = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TasGaussianApprox {
    pub eta: f64,
    pub sigma_sq: f64,
    pub xi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TasTrimmedSumStats {
    pub u: f64,
    pub eta_t: f64,
    pub sigma_t_sq: f64,
    pub xi_t: f64,
}

/// One channel realization. `geometric_mi` is NaN when `geometric_valid` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TasTrialRecord {
    pub exact_mi: f64,
    pub geometric_mi: f64,
    pub geometric_valid: u8,
    pub jensen_bound: f64,
    pub trace_j: f64,
}

/// Validated system configuration.
pub struct TasConfig {
    inner: SystemConfig,
}

/// Monte Carlo trial source bound to one configuration.
pub struct TasSimulator {
    cfg: SystemConfig,
    next_trial: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(err: &Error) -> TasStatus {
    match err {
        Error::InvalidConfig { .. } => TasStatus::InvalidConfig,
        Error::Numeric(_) => TasStatus::Numeric,
        Error::Domain(_) => TasStatus::Domain,
        Error::Solver { .. } => TasStatus::Solver,
        _ => TasStatus::InvalidArgument,
    }
}

fn fail(status: TasStatus, msg: impl Into<String>) -> TasStatus {
    set_last_error(msg.into());
    status
}

fn guard<F: FnOnce() -> Result<(), TasStatus>>(f: F) -> TasStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TasStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(TasStatus::Panic, "internal panic"),
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, TasStatus>;
}

impl<T> IntoStatus<T> for tas_capacity::Result<T> {
    fn status(self) -> Result<T, TasStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, TasStatus> {
    p.as_ref().ok_or_else(|| fail(TasStatus::NullPointer, format!("{what} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, TasStatus> {
    p.as_mut().ok_or_else(|| fail(TasStatus::NullPointer, format!("{what} is null")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Validates and allocates a configuration. The SNR is given in dB.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tas_config_new(
    n_t: usize,
    n_r: usize,
    l_t: usize,
    rho_db: f64,
    seed: u64,
    out: *mut *mut TasConfig,
) -> TasStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let inner = SystemConfig::with_db_snr(n_t, n_r, l_t, rho_db, seed).status()?;
        *out = Box::into_raw(Box::new(TasConfig { inner }));
        Ok(())
    })
}

/// Parses a JSON object with fields `n_t`, `n_r`, `l_t`, `rho_db` and an optional `seed`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tas_config_from_json(json: *const c_char, out: *mut *mut TasConfig) -> TasStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let json = deref(json, "json")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(TasStatus::InvalidArgument, "json is not UTF-8"))?;
        let inner = SystemConfig::from_json(text).status()?;
        *out = Box::into_raw(Box::new(TasConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from `tas_config_new`/`tas_config_from_json`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tas_config_free(cfg: *mut TasConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live config handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tas_trimmed_sum_stats(cfg: *const TasConfig, out: *mut TasTrimmedSumStats) -> TasStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let out = deref_mut(out, "out")?;
        let s = trimmed_sum_stats(&cfg.inner).status()?;
        *out = TasTrimmedSumStats { u: s.u, eta_t: s.eta_t, sigma_t_sq: s.sigma_t_sq, xi_t: s.xi_t };
        Ok(())
    })
}

/// Closed-form Gaussian approximation `N(η, σ²)` of the mutual information.
///
/// # Safety
/// `cfg` must be a live config handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tas_gaussian_approx(cfg: *const TasConfig, out: *mut TasGaussianApprox) -> TasStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let out = deref_mut(out, "out")?;
        let a = proposition_mean_variance(&cfg.inner).status()?;
        *out = TasGaussianApprox { eta: a.eta, sigma_sq: a.sigma_sq, xi: a.xi };
        Ok(())
    })
}

/// Ergodic capacity in bits per channel use.
///
/// # Safety
/// `cfg` must be a live config handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tas_ergodic_capacity(cfg: *const TasConfig, out: *mut f64) -> TasStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let out = deref_mut(out, "out")?;
        *out = proposition_mean_variance(&cfg.inner).status()?.eta;
        Ok(())
    })
}

/// Outage capacity for `0 < p_out < 1`.
///
/// # Safety
/// `cfg` must be a live config handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tas_outage_capacity(
    cfg: *const TasConfig,
    p_out: f64,
    convention: TasOutageConvention,
    out: *mut f64,
) -> TasStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        let out = deref_mut(out, "out")?;
        let convention = match convention {
            TasOutageConvention::Paper => OutageConvention::Paper,
            TasOutageConvention::Standard => OutageConvention::Standard,
        };
        let spec = OutageSpec::new(p_out, convention).status()?;
        *out = outage_capacity(&cfg.inner, &spec).status()?;
        Ok(())
    })
}

/// Creates a simulator over a copy of `cfg`; the config handle may be freed afterwards.
///
/// # Safety
/// `cfg` must be a live config handle and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tas_simulator_new(cfg: *const TasConfig, out: *mut *mut TasSimulator) -> TasStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let cfg = deref(cfg, "cfg")?;
        *out = Box::into_raw(Box::new(TasSimulator { cfg: cfg.inner, next_trial: 0 }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a live simulator handle.
#[no_mangle]
pub unsafe extern "C" fn tas_simulator_free(sim: *mut TasSimulator) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

fn trial_record(cfg: &SystemConfig, trial: u64) -> Result<TasTrialRecord, TasStatus> {
    let sel = select_antennas(&sample_channel(cfg, trial), cfg.l_t());
    let geometric = geometric_mi_approx(&sel, cfg.rho()).ok();
    Ok(TasTrialRecord {
        exact_mi: exact_mutual_information(&sel, cfg.rho()).status()?,
        geometric_mi: geometric.unwrap_or(f64::NAN),
        geometric_valid: geometric.is_some() as u8,
        jensen_bound: jensen_upper_bound(&sel, cfg.rho()),
        trace_j: sel.trace_j(),
    })
}

/// Evaluates trial `trial`. The result depends only on the seed and the
/// index, so trials may be requested in any order.
///
/// # Safety
/// `sim` must be a live simulator handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tas_simulator_run_trial(
    sim: *const TasSimulator,
    trial: u64,
    out: *mut TasTrialRecord,
) -> TasStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let out = deref_mut(out, "out")?;
        *out = trial_record(&sim.cfg, trial)?;
        Ok(())
    })
}

/// Fills `out[0..count]` with the next `count` trials and advances the cursor.
///
/// # Safety
/// `sim` must be a live simulator handle and `out` must point to `count`
/// writable records (it may be null when `count` is 0).
#[no_mangle]
pub unsafe extern "C" fn tas_simulator_next(sim: *mut TasSimulator, out: *mut TasTrialRecord, count: usize) -> TasStatus {
    guard(|| {
        let sim = deref_mut(sim, "sim")?;
        if count == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(fail(TasStatus::NullPointer, "out is null"));
        }
        let records = std::slice::from_raw_parts_mut(out, count);
        for slot in records {
            *slot = trial_record(&sim.cfg, sim.next_trial)?;
            sim.next_trial += 1;
        }
        Ok(())
    })
}
