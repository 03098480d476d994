//! C ABI for the linksim simulator.
//!
//! The surface follows the usual handle pattern: opaque pointers created
//! and destroyed by this library, integer status codes, and a thread-local
//! last-error message. A typical session:
//!
//! ```c
//! LinksimScenario *scenario = NULL;
//! linksim_scenario_load("sweep.cfg", &scenario);
//! linksim_scenario_set(scenario, "n_trials", "2000");
//! LinksimResults *results = NULL;
//! if (linksim_run_sweep(scenario, 0, &results) != LINKSIM_STATUS_OK) {
//!     fprintf(stderr, "%s\n", linksim_last_error());
//! }
//! linksim_results_write_csv(results, "rows.csv");
//! linksim_results_free(results);
//! linksim_scenario_free(scenario);
//! ```
//!
//! The generated header lands in `include/linksim.h`.

use linksim::sim_harness::{
    csv_string, run_sweep_with_workers, write_csv_file, ScenarioConfig, SweepResultRow,
};
use linksim::LinkSimError;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinksimStatus {
    Ok = 0,
    /// Failure while running a sweep or writing results.
    RuntimeError = 1,
    /// Invalid configuration, unknown key, or missing input file.
    ConfigError = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 4,
    /// A row index was out of range.
    IndexOutOfRange = 5,
    /// Filesystem error.
    IoError = 6,
}

/// Opaque sweep configuration handle.
pub struct LinksimScenario {
    _private: [u8; 0],
}

/// Opaque sweep results handle.
pub struct LinksimResults {
    _private: [u8; 0],
}

/// One aggregated sweep row. The scenario name is available separately via
/// `linksim_results_scenario_name`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LinksimRow {
    pub al: u32,
    pub regb_size: u32,
    pub snr_db: f64,
    pub mean_eesm_db: f64,
    pub linear_mean_eesm_db: f64,
    pub stderr_db: f64,
    pub n_trials: u64,
    pub master_seed: u64,
}

struct ScenarioHolder {
    cfg: ScenarioConfig,
}

struct ResultsHolder {
    rows: Vec<SweepResultRow>,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = owned);
}

fn status_of(err: &LinkSimError) -> LinksimStatus {
    match err {
        LinkSimError::Config(_)
        | LinkSimError::PdpFormat { .. }
        | LinkSimError::InvalidRegbSize(_)
        | LinkSimError::InvalidAggregationLevel(_)
        | LinkSimError::UnsupportedCoresetDuration(_)
        | LinkSimError::InvalidNumerology(_) => LinksimStatus::ConfigError,
        LinkSimError::Io { .. } => LinksimStatus::IoError,
        _ => LinksimStatus::RuntimeError,
    }
}

fn fail(err: &LinkSimError) -> LinksimStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

unsafe fn utf8_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, LinksimStatus> {
    if ptr.is_null() {
        set_last_error(&format!("{what} is null"));
        return Err(LinksimStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(&format!("{what} is not valid UTF-8"));
        LinksimStatus::InvalidUtf8
    })
}

unsafe fn scenario_ref<'a>(ptr: *const LinksimScenario) -> Result<&'a ScenarioHolder, LinksimStatus> {
    if ptr.is_null() {
        set_last_error("scenario handle is null");
        return Err(LinksimStatus::NullPointer);
    }
    Ok(&*(ptr as *const ScenarioHolder))
}

unsafe fn results_ref<'a>(ptr: *const LinksimResults) -> Result<&'a ResultsHolder, LinksimStatus> {
    if ptr.is_null() {
        set_last_error("results handle is null");
        return Err(LinksimStatus::NullPointer);
    }
    Ok(&*(ptr as *const ResultsHolder))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn linksim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn linksim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a scenario with default parameters (no PDP file set).
///
/// # Safety
/// `out` must be a valid pointer to a `LinksimScenario*`.
#[no_mangle]
pub unsafe extern "C" fn linksim_scenario_default(
    out: *mut *mut LinksimScenario,
) -> LinksimStatus {
    if out.is_null() {
        set_last_error("out pointer is null");
        return LinksimStatus::NullPointer;
    }
    let holder = Box::new(ScenarioHolder {
        cfg: ScenarioConfig::default(),
    });
    *out = Box::into_raw(holder) as *mut LinksimScenario;
    LinksimStatus::Ok
}

/// Parse a `key = value` config file into a new scenario.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linksim_scenario_load(
    path: *const c_char,
    out: *mut *mut LinksimScenario,
) -> LinksimStatus {
    if out.is_null() {
        set_last_error("out pointer is null");
        return LinksimStatus::NullPointer;
    }
    let path = match utf8_arg(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match ScenarioConfig::from_file(path) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(ScenarioHolder { cfg })) as *mut LinksimScenario;
            LinksimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Apply one `key = value` assignment to a scenario.
///
/// # Safety
/// `scenario` must come from a constructor of this library and not be
/// freed; `key` and `value` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn linksim_scenario_set(
    scenario: *mut LinksimScenario,
    key: *const c_char,
    value: *const c_char,
) -> LinksimStatus {
    if scenario.is_null() {
        set_last_error("scenario handle is null");
        return LinksimStatus::NullPointer;
    }
    let key = match utf8_arg(key, "key") {
        Ok(k) => k,
        Err(s) => return s,
    };
    let value = match utf8_arg(value, "value") {
        Ok(v) => v,
        Err(s) => return s,
    };
    let holder = &mut *(scenario as *mut ScenarioHolder);
    match holder.cfg.set(key, value) {
        Ok(()) => LinksimStatus::Ok,
        Err(e) => fail(&e),
    }
}

/// Validate the scenario without running it.
///
/// # Safety
/// `scenario` must come from a constructor of this library.
#[no_mangle]
pub unsafe extern "C" fn linksim_scenario_validate(
    scenario: *const LinksimScenario,
) -> LinksimStatus {
    let holder = match scenario_ref(scenario) {
        Ok(h) => h,
        Err(s) => return s,
    };
    match holder.cfg.validate() {
        Ok(()) => LinksimStatus::Ok,
        Err(e) => fail(&e),
    }
}

/// Free a scenario handle. Null is ignored.
///
/// # Safety
/// `scenario` must come from a constructor of this library and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn linksim_scenario_free(scenario: *mut LinksimScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario as *mut ScenarioHolder));
    }
}

/// Run the sweep on `workers` threads (0 = all cores) and hand back a
/// results handle.
///
/// # Safety
/// `scenario` must come from a constructor of this library; `out` must be
/// a valid pointer to a `LinksimResults*`.
#[no_mangle]
pub unsafe extern "C" fn linksim_run_sweep(
    scenario: *const LinksimScenario,
    workers: usize,
    out: *mut *mut LinksimResults,
) -> LinksimStatus {
    if out.is_null() {
        set_last_error("out pointer is null");
        return LinksimStatus::NullPointer;
    }
    let holder = match scenario_ref(scenario) {
        Ok(h) => h,
        Err(s) => return s,
    };
    let workers = if workers == 0 { None } else { Some(workers) };
    match run_sweep_with_workers(&holder.cfg, workers) {
        Ok(rows) => {
            let names = rows
                .iter()
                .map(|r| CString::new(r.scenario.replace('\0', " ")).unwrap_or_default())
                .collect();
            *out = Box::into_raw(Box::new(ResultsHolder { rows, names })) as *mut LinksimResults;
            LinksimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Number of aggregated rows.
///
/// # Safety
/// `results` must come from `linksim_run_sweep`. Null yields 0.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_len(results: *const LinksimResults) -> usize {
    results_ref(results).map(|h| h.rows.len()).unwrap_or(0)
}

/// Copy row `index` into `row`.
///
/// # Safety
/// `results` must come from `linksim_run_sweep`; `row` must be a valid
/// pointer to a `LinksimRow`.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_row(
    results: *const LinksimResults,
    index: usize,
    row: *mut LinksimRow,
) -> LinksimStatus {
    let holder = match results_ref(results) {
        Ok(h) => h,
        Err(s) => return s,
    };
    if row.is_null() {
        set_last_error("row pointer is null");
        return LinksimStatus::NullPointer;
    }
    let Some(r) = holder.rows.get(index) else {
        set_last_error(&format!(
            "row index {index} out of range ({} rows)",
            holder.rows.len()
        ));
        return LinksimStatus::IndexOutOfRange;
    };
    *row = LinksimRow {
        al: r.al,
        regb_size: r.regb_size,
        snr_db: r.snr_db,
        mean_eesm_db: r.mean_eesm_db,
        linear_mean_eesm_db: r.linear_mean_eesm_db,
        stderr_db: r.stderr_db,
        n_trials: r.n_trials,
        master_seed: r.master_seed,
    };
    LinksimStatus::Ok
}

/// Scenario name of row `index`; owned by the results handle and valid
/// while it lives. Null on a bad index.
///
/// # Safety
/// `results` must come from `linksim_run_sweep`.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_scenario_name(
    results: *const LinksimResults,
    index: usize,
) -> *const c_char {
    match results_ref(results) {
        Ok(h) => h
            .names
            .get(index)
            .map(|n| n.as_ptr())
            .unwrap_or(std::ptr::null()),
        Err(_) => std::ptr::null(),
    }
}

/// Serialize all rows to CSV. Free the returned string with
/// `linksim_string_free`. Null on error.
///
/// # Safety
/// `results` must come from `linksim_run_sweep`.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_to_csv(results: *const LinksimResults) -> *mut c_char {
    match results_ref(results) {
        Ok(h) => CString::new(csv_string(&h.rows))
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Write all rows to a CSV file.
///
/// # Safety
/// `results` must come from `linksim_run_sweep`; `path` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_write_csv(
    results: *const LinksimResults,
    path: *const c_char,
) -> LinksimStatus {
    let holder = match results_ref(results) {
        Ok(h) => h,
        Err(s) => return s,
    };
    let path = match utf8_arg(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match write_csv_file(&holder.rows, Path::new(path)) {
        Ok(()) => LinksimStatus::Ok,
        Err(e) => fail(&e),
    }
}

/// Free a results handle. Null is ignored.
///
/// # Safety
/// `results` must come from `linksim_run_sweep` and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn linksim_results_free(results: *mut LinksimResults) {
    if !results.is_null() {
        drop(Box::from_raw(results as *mut ResultsHolder));
    }
}

/// Free a string returned by `linksim_results_to_csv`. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn linksim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
