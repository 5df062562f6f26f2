//! C ABI over the `boostcycle` library.
//!
//! Objects are opaque handles created by `bc_*` constructors and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`BcStatus`]; on failure a message is available from
//! [`bc_last_error_message`] on the same thread. Strings returned through out
//! parameters are owned by the caller and must be released with
//! [`bc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use boostcycle::cli::format_scalar;
use boostcycle::cycle::{
    detect_cycle, CycleConfig, CycleReport, DEFAULT_MIN_REPEATS, DEFAULT_TOLERANCE,
};
use boostcycle::engine::{run, BoostTrace, SelectionRule};
use boostcycle::farey::{periodic_point, FareyWord};
use boostcycle::scalar::{Rational, Real, Scalar};
use boostcycle::simplex::HypothesisPool;
use boostcycle::tracefile::{from_json, to_json, AnyTrace, TraceDocument, TraceMeta};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Engine = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcMode {
    Float = 0,
    Exact = 1,
}

/// Cycle detection settings. `has_burn_in == false` selects the default
/// burn-in of half the trace.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BcCycleConfig {
    pub tol: f64,
    pub min_repeats: usize,
    pub burn_in: usize,
    pub has_burn_in: bool,
}

pub struct BcPool {
    inner: Arc<HypothesisPool>,
}

pub struct BcTrace {
    doc: TraceDocument,
}

pub struct BcCycleReport {
    inner: CycleReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(status: BcStatus, msg: impl std::fmt::Display) -> BcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> BcStatus) -> BcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(BcStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, BcStatus> {
    if p.is_null() {
        return Err(fail(BcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(BcStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a pool: one dichotomy per line written with `+` and `-`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_pool_parse(text: *const c_char, out: *mut *mut BcPool) -> BcStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(str_arg(text, "text"));
        match HypothesisPool::parse(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(BcPool { inner: Arc::new(p) }));
                BcStatus::Ok
            }
            Err(e) => fail(BcStatus::Parse, e),
        }
    })
}

/// # Safety
/// `pool` must be null or a handle from [`bc_pool_parse`].
#[no_mangle]
pub unsafe extern "C" fn bc_pool_free(pool: *mut BcPool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// # Safety
/// `pool` must be a live handle and the out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn bc_pool_shape(
    pool: *const BcPool,
    n_points: *mut usize,
    n_rows: *mut usize,
) -> BcStatus {
    guard(|| {
        non_null!(pool, n_points, n_rows);
        let p = &(*pool).inner;
        *n_points = p.n_points();
        *n_rows = p.len();
        BcStatus::Ok
    })
}

fn run_typed<S: Scalar>(
    pool: Arc<HypothesisPool>,
    rule: &str,
    iters: usize,
) -> Result<AnyTrace, BcStatus>
where
    BoostTrace<S>: Into<AnyTrace>,
{
    let rule = SelectionRule::<S>::parse(rule).map_err(|e| fail(BcStatus::InvalidArgument, e))?;
    let trace = run::<S>(pool, rule, iters).map_err(|e| fail(BcStatus::Engine, e))?;
    Ok(trace.into())
}

/// Runs boosting from uniform weights. `rule` is `optimal`,
/// `first-above:THETA` or `fixed:I,J,...`; null means `optimal`.
///
/// # Safety
/// `pool` must be a live handle, `rule` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_run(
    pool: *const BcPool,
    rule: *const c_char,
    mode: BcMode,
    iters: usize,
    out: *mut *mut BcTrace,
) -> BcStatus {
    guard(|| {
        non_null!(pool, out);
        let rule = if rule.is_null() {
            "optimal"
        } else {
            try_ffi!(str_arg(rule, "rule"))
        };
        let pool = Arc::clone(&(*pool).inner);
        let trace = try_ffi!(match mode {
            BcMode::Exact => run_typed::<Rational>(pool, rule, iters),
            BcMode::Float => run_typed::<f64>(pool, rule, iters),
        });
        let doc = TraceDocument {
            meta: TraceMeta::pool(None),
            trace,
        };
        *out = Box::into_raw(Box::new(BcTrace { doc }));
        BcStatus::Ok
    })
}

/// # Safety
/// `trace` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_free(trace: *mut BcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of recorded steps.
///
/// # Safety
/// `trace` must be a live handle and `len` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_len(trace: *const BcTrace, len: *mut usize) -> BcStatus {
    guard(|| {
        non_null!(trace, len);
        *len = (*trace).doc.trace.len();
        BcStatus::Ok
    })
}

/// Whether the run stopped before its budget (weak-learning failure or
/// perfect classification).
///
/// # Safety
/// `trace` must be a live handle and `halted` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_halted(trace: *const BcTrace, halted: *mut bool) -> BcStatus {
    guard(|| {
        non_null!(trace, halted);
        *halted = match &(*trace).doc.trace {
            AnyTrace::Exact(t) => t.halt().is_some(),
            AnyTrace::Float(t) => t.halt().is_some(),
        };
        BcStatus::Ok
    })
}

fn check_step(trace: &AnyTrace, k: usize) -> Result<(), BcStatus> {
    if k < trace.len() {
        Ok(())
    } else {
        Err(fail(
            BcStatus::OutOfRange,
            format!("step {k} outside trace of {} steps", trace.len()),
        ))
    }
}

/// Edge and chosen pool row at step `k` (a position in the trace).
///
/// # Safety
/// `trace` must be a live handle; out pointers may be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_step(
    trace: *const BcTrace,
    k: usize,
    edge: *mut f64,
    row: *mut usize,
) -> BcStatus {
    guard(|| {
        non_null!(trace);
        let t = &(*trace).doc.trace;
        try_ffi!(check_step(t, k));
        let (e, r) = match t {
            AnyTrace::Exact(t) => (t.steps()[k].edge.to_f64(), t.steps()[k].row),
            AnyTrace::Float(t) => (t.steps()[k].edge, t.steps()[k].row),
        };
        if !edge.is_null() {
            *edge = e;
        }
        if !row.is_null() {
            *row = r;
        }
        BcStatus::Ok
    })
}

/// Edge at step `k` as text: `p/q` for exact traces, 12 significant digits
/// for float traces.
///
/// # Safety
/// `trace` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_edge_text(
    trace: *const BcTrace,
    k: usize,
    out: *mut *mut c_char,
) -> BcStatus {
    guard(|| {
        non_null!(trace, out);
        let t = &(*trace).doc.trace;
        try_ffi!(check_step(t, k));
        let text = match t {
            AnyTrace::Exact(t) => format_scalar(&t.steps()[k].edge),
            AnyTrace::Float(t) => format_scalar(&t.steps()[k].edge),
        };
        *out = into_c_string(text);
        BcStatus::Ok
    })
}

/// Copies the weights in force at step `k` into `buf`, which must hold the
/// number of points. Position `len` gives the weights after the last step.
///
/// # Safety
/// `trace` must be a live handle and `buf` writable for `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_weights(
    trace: *const BcTrace,
    k: usize,
    buf: *mut f64,
    buf_len: usize,
) -> BcStatus {
    guard(|| {
        non_null!(trace, buf);
        let t = &(*trace).doc.trace;
        if k > t.len() {
            return fail(
                BcStatus::OutOfRange,
                format!("position {k} outside 0..={}", t.len()),
            );
        }
        let w = match t {
            AnyTrace::Exact(t) => t.weights_at(k).to_f64_vec(),
            AnyTrace::Float(t) => t.weights_at(k).to_f64_vec(),
        };
        if buf_len < w.len() {
            return fail(
                BcStatus::InvalidArgument,
                format!("buffer holds {buf_len}, need {}", w.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, w.len()).copy_from_slice(&w);
        BcStatus::Ok
    })
}

/// Serializes the trace in the versioned JSON trace format.
///
/// # Safety
/// `trace` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_to_json(
    trace: *const BcTrace,
    out: *mut *mut c_char,
) -> BcStatus {
    guard(|| {
        non_null!(trace, out);
        *out = into_c_string(to_json(&(*trace).doc));
        BcStatus::Ok
    })
}

/// Reads a trace from JSON text.
///
/// # Safety
/// `text` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_trace_from_json(
    text: *const c_char,
    out: *mut *mut BcTrace,
) -> BcStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(str_arg(text, "text"));
        match from_json(text) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(BcTrace { doc }));
                BcStatus::Ok
            }
            Err(e) => fail(BcStatus::Parse, e),
        }
    })
}

#[no_mangle]
pub extern "C" fn bc_cycle_config_default() -> BcCycleConfig {
    BcCycleConfig {
        tol: DEFAULT_TOLERANCE,
        min_repeats: DEFAULT_MIN_REPEATS,
        burn_in: 0,
        has_burn_in: false,
    }
}

/// Looks for a limit cycle. On success `*out` is a report handle, or null
/// when no cycle was found. A null `config` uses the defaults.
///
/// # Safety
/// `trace` must be a live handle, `config` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_detect_cycle(
    trace: *const BcTrace,
    config: *const BcCycleConfig,
    out: *mut *mut BcCycleReport,
) -> BcStatus {
    guard(|| {
        non_null!(trace, out);
        let c = if config.is_null() {
            bc_cycle_config_default()
        } else {
            *config
        };
        if !(c.tol.is_finite() && c.tol >= 0.0) {
            return fail(
                BcStatus::InvalidArgument,
                "tol must be finite and non-negative",
            );
        }
        let cfg = CycleConfig {
            tol: c.tol,
            min_repeats: c.min_repeats,
            burn_in: c.has_burn_in.then_some(c.burn_in),
        };
        let report = match &(*trace).doc.trace {
            AnyTrace::Exact(t) => detect_cycle(t, &cfg),
            AnyTrace::Float(t) => detect_cycle(t, &cfg),
        };
        *out = report.map_or(ptr::null_mut(), |r| {
            Box::into_raw(Box::new(BcCycleReport { inner: r }))
        });
        BcStatus::Ok
    })
}

/// # Safety
/// `report` must be null or a handle from [`bc_detect_cycle`].
#[no_mangle]
pub unsafe extern "C" fn bc_cycle_free(report: *mut BcCycleReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Summary numbers of a cycle report. Any out pointer may be null.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bc_cycle_summary(
    report: *const BcCycleReport,
    period: *mut usize,
    edge_period: *mut usize,
    phase: *mut usize,
    mean_edge: *mut f64,
    nabla_holds: *mut bool,
) -> BcStatus {
    guard(|| {
        non_null!(report);
        let r = &(*report).inner;
        if !period.is_null() {
            *period = r.period;
        }
        if !edge_period.is_null() {
            *edge_period = r.edge_period;
        }
        if !phase.is_null() {
            *phase = r.phase;
        }
        if !mean_edge.is_null() {
            *mean_edge = r.mean_edge;
        }
        if !nabla_holds.is_null() {
            *nabla_holds = r.nabla.holds();
        }
        BcStatus::Ok
    })
}

/// Edge value `i` of the cycle, `0 <= i < edge_period`.
///
/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_cycle_edge_value(
    report: *const BcCycleReport,
    i: usize,
    out: *mut f64,
) -> BcStatus {
    guard(|| {
        non_null!(report, out);
        let r = &(*report).inner;
        match r.edge_values.get(i) {
            Some(v) => {
                *out = *v;
                BcStatus::Ok
            }
            None => fail(BcStatus::OutOfRange, format!("edge value {i} out of range")),
        }
    })
}

/// Farey word matching the cycle edges, or null in `*out` when none matched.
///
/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bc_cycle_farey_word(
    report: *const BcCycleReport,
    out: *mut *mut c_char,
) -> BcStatus {
    guard(|| {
        non_null!(report, out);
        *out = (*report)
            .inner
            .farey_word
            .as_ref()
            .map_or(ptr::null_mut(), |w| into_c_string(w.to_string()));
        BcStatus::Ok
    })
}

/// Periodic point of a word over `L`/`R`: its exact form (for example
/// `(-1/2+1/2*sqrt(5))`) and its value as a double. Either out pointer may be
/// null.
///
/// # Safety
/// `word` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bc_farey_periodic_point(
    word: *const c_char,
    exact: *mut *mut c_char,
    value: *mut f64,
) -> BcStatus {
    guard(|| {
        let word = try_ffi!(str_arg(word, "word"));
        let word: FareyWord = match word.parse() {
            Ok(w) => w,
            Err(e) => return fail(BcStatus::Parse, e),
        };
        let p = match periodic_point(&word) {
            Ok(p) => p,
            Err(e) => return fail(BcStatus::InvalidArgument, e),
        };
        if !exact.is_null() {
            *exact = into_c_string(p.value.to_string());
        }
        if !value.is_null() {
            *value = p.value.to_f64();
        }
        BcStatus::Ok
    })
}
