//! C ABI for the iawlan simulator.
//!
//! Experiments are opaque handles created from a TOML document and freed with
//! [`iaw_experiment_free`]. Every fallible call returns an [`IawStatus`]; on
//! failure the message is available from [`iaw_last_error_message`] on the
//! same thread. Strings handed out by the library must be released with
//! [`iaw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iawlan::cli::{parse_config, CliError};
use iawlan::experiment::{aggregate, Experiment, ExperimentConfig};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IawStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration was rejected.
    ConfigError = 3,
    /// The simulation failed.
    RuntimeError = 4,
    /// An index was out of range.
    OutOfRange = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Opaque experiment handle.
pub struct IawExperiment {
    inner: Experiment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: IawStatus, msg: impl Into<String>) -> IawStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> IawStatus) -> IawStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(IawStatus::Panic, "internal panic"),
    }
}

fn hand_out(s: String, out: *mut *mut c_char) -> IawStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before reaching here.
            unsafe { *out = c.into_raw() };
            IawStatus::Ok
        }
        Err(e) => fail(IawStatus::RuntimeError, e.to_string()),
    }
}

fn from_config(cfg: ExperimentConfig, out: *mut *mut IawExperiment) -> IawStatus {
    match Experiment::new(cfg) {
        Ok(inner) => {
            // SAFETY: callers check `out` for null before reaching here.
            unsafe { *out = Box::into_raw(Box::new(IawExperiment { inner })) };
            IawStatus::Ok
        }
        Err(e) => match CliError::from(e) {
            CliError::Config(m) => fail(IawStatus::ConfigError, m),
            CliError::Runtime(m) => fail(IawStatus::RuntimeError, m),
        },
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iaw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iaw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an experiment with the default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_new_default(out: *mut *mut IawExperiment) -> IawStatus {
    if out.is_null() {
        return fail(IawStatus::NullPointer, "out is null");
    }
    guard(|| from_config(ExperimentConfig::default(), out))
}

/// Creates an experiment from a TOML configuration; missing fields take
/// their defaults.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_new_from_toml(
    toml: *const c_char,
    out: *mut *mut IawExperiment,
) -> IawStatus {
    if toml.is_null() || out.is_null() {
        return fail(IawStatus::NullPointer, "null argument");
    }
    let Ok(text) = CStr::from_ptr(toml).to_str() else {
        return fail(IawStatus::InvalidUtf8, "config is not UTF-8");
    };
    guard(|| match parse_config(text) {
        Ok(cfg) => from_config(cfg, out),
        Err(e) => fail(IawStatus::ConfigError, e.to_string()),
    })
}

/// Releases an experiment handle. Null is ignored.
///
/// # Safety
/// `exp` must come from an `iaw_experiment_new_*` call and not be used again.
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_free(exp: *mut IawExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Number of configured trials.
///
/// # Safety
/// `exp` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_n_trials(exp: *const IawExperiment, out: *mut usize) -> IawStatus {
    if exp.is_null() || out.is_null() {
        return fail(IawStatus::NullPointer, "null argument");
    }
    *out = (*exp).inner.cfg.n_trials;
    IawStatus::Ok
}

/// Runs one trial and returns its result as a JSON document.
///
/// # Safety
/// `exp` must be a live handle and `out_json` a valid pointer. The returned
/// string must be freed with [`iaw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_run_trial_json(
    exp: *const IawExperiment,
    trial_index: usize,
    out_json: *mut *mut c_char,
) -> IawStatus {
    if exp.is_null() || out_json.is_null() {
        return fail(IawStatus::NullPointer, "null argument");
    }
    let exp = &(*exp).inner;
    if trial_index >= exp.cfg.n_trials {
        return fail(
            IawStatus::OutOfRange,
            format!("trial {trial_index} out of range (n_trials = {})", exp.cfg.n_trials),
        );
    }
    guard(|| {
        let r = exp.run_trial(trial_index);
        match serde_json::to_string(&r) {
            Ok(s) => hand_out(s, out_json),
            Err(e) => fail(IawStatus::RuntimeError, e.to_string()),
        }
    })
}

/// Runs every trial and returns the aggregated summary as JSON.
///
/// # Safety
/// As for [`iaw_experiment_run_trial_json`].
#[no_mangle]
pub unsafe extern "C" fn iaw_experiment_run_summary_json(
    exp: *const IawExperiment,
    out_json: *mut *mut c_char,
) -> IawStatus {
    if exp.is_null() || out_json.is_null() {
        return fail(IawStatus::NullPointer, "null argument");
    }
    let exp = &(*exp).inner;
    guard(|| {
        let results = exp.run_all();
        let summary = match aggregate(&results, exp.cfg.evm_rate, exp.cfg.ber_target) {
            Ok(s) => s,
            Err(e) => return fail(IawStatus::RuntimeError, e.to_string()),
        };
        match serde_json::to_string(&summary) {
            Ok(s) => hand_out(s, out_json),
            Err(e) => fail(IawStatus::RuntimeError, e.to_string()),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn iaw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
