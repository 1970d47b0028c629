//! C ABI over the `satq` library.
//!
//! Every fallible call returns a [`SatqStatus`]; on failure the message is
//! available from [`satq_last_error`] on the same thread. Handles are opaque
//! and must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use satq::channel::{geometric_loss_db, qber};
use satq::harness::{apply_override, monte_carlo, ScenarioConfig, DEFAULT_CONFIG_TOML};
use satq::metrics::secure_key_rate;
use satq::routing::{purify_link, second_path, shortest_path, Path, WeightedGraph};
use satq::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    NoPath = 4,
    BufferTooSmall = 5,
    Simulation = 6,
    Panic = 7,
}

/// Aggregate Monte Carlo results.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SatqStats {
    pub mean_f_eff: f64,
    pub mean_r_eff_bps: f64,
    pub mean_path_len: f64,
    pub mean_key_rate_bps: f64,
    pub perf_index: f64,
    pub std_f_eff: f64,
    pub std_r_eff_bps: f64,
    pub std_path_len: f64,
    pub std_key_rate_bps: f64,
    pub availability: f64,
    pub qber_compliant_fraction: f64,
    pub mean_density_per_km3: f64,
    pub n_routes: usize,
    pub n_requests: usize,
    pub run_count: usize,
}

/// Opaque scenario configuration.
pub struct SatqConfig {
    inner: ScenarioConfig,
}

/// Opaque undirected weighted graph.
pub struct SatqGraph {
    inner: WeightedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SatqStatus {
    match e {
        Error::Config(_) | Error::SpacingInfeasible { .. } => SatqStatus::Config,
        Error::InvalidParameter { .. } | Error::UnknownNode(_) | Error::MissingLink(..) => {
            SatqStatus::InvalidArgument
        }
        _ => SatqStatus::Simulation,
    }
}

fn fail(e: Error) -> SatqStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

/// Run `f`, converting panics into [`SatqStatus::Panic`].
fn guarded(f: impl FnOnce() -> SatqStatus) -> SatqStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SatqStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SatqStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(SatqStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        SatqStatus::InvalidArgument
    })
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next `satq_*` call on the same thread.
#[no_mangle]
pub extern "C" fn satq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn satq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// One round of recurrence purification.
#[no_mangle]
pub extern "C" fn satq_purify(fidelity: f64) -> f64 {
    purify_link(fidelity)
}

/// QBER implied by a fidelity.
#[no_mangle]
pub extern "C" fn satq_qber(fidelity: f64) -> f64 {
    qber(fidelity)
}

/// Secure key rate for an end-to-end fidelity and bottleneck rate.
#[no_mangle]
pub extern "C" fn satq_secure_key_rate(fidelity: f64, rate_bps: f64) -> f64 {
    secure_key_rate(fidelity, rate_bps)
}

/// Free-space geometric loss in dB.
///
/// # Safety
/// `out_db` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_geometric_loss_db(
    distance_km: f64,
    wavelength_m: f64,
    out_db: *mut f64,
) -> SatqStatus {
    guarded(|| {
        if out_db.is_null() {
            set_error("out_db is null");
            return SatqStatus::NullPointer;
        }
        match geometric_loss_db(distance_km, wavelength_m) {
            Ok(v) => {
                *out_db = v;
                SatqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Create a configuration holding the built-in defaults.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_config_default(out: *mut *mut SatqConfig) -> SatqStatus {
    satq_config_from_toml(DEFAULT_CONFIG_TOML.as_ptr().cast(), DEFAULT_CONFIG_TOML.len(), out)
}

/// Parse a TOML configuration of `len` bytes.
///
/// # Safety
/// `toml` must point to `len` readable bytes; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_config_from_toml(
    toml: *const c_char,
    len: usize,
    out: *mut *mut SatqConfig,
) -> SatqStatus {
    guarded(|| {
        if toml.is_null() || out.is_null() {
            set_error("null argument");
            return SatqStatus::NullPointer;
        }
        let bytes = std::slice::from_raw_parts(toml.cast::<u8>(), len);
        let Ok(text) = std::str::from_utf8(bytes) else {
            set_error("configuration is not valid UTF-8");
            return SatqStatus::InvalidArgument;
        };
        match ScenarioConfig::from_toml_str(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SatqConfig { inner }));
                SatqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Apply one `section.key=value` override. The configuration is left
/// unchanged when the result does not validate.
///
/// # Safety
/// `config` must be a live handle; `assignment` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn satq_config_set(
    config: *mut SatqConfig,
    assignment: *const c_char,
) -> SatqStatus {
    guarded(|| {
        let Some(cfg) = config.as_mut() else {
            set_error("config is null");
            return SatqStatus::NullPointer;
        };
        let assignment = match str_arg(assignment) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let mut table: toml::Table = match toml::Value::try_from(&cfg.inner) {
            Ok(toml::Value::Table(t)) => t,
            _ => {
                set_error("configuration does not serialize");
                return SatqStatus::Simulation;
            }
        };
        if let Err(e) = apply_override(&mut table, assignment) {
            return fail(e);
        }
        match ScenarioConfig::from_toml_str(&toml::to_string(&table).unwrap_or_default()) {
            Ok(inner) => {
                cfg.inner = inner;
                SatqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn satq_config_free(config: *mut SatqConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the configured Monte Carlo experiment on `threads` workers.
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_monte_carlo(
    config: *const SatqConfig,
    threads: usize,
    out: *mut SatqStats,
) -> SatqStatus {
    guarded(|| {
        let (Some(cfg), false) = (config.as_ref(), out.is_null()) else {
            set_error("null argument");
            return SatqStatus::NullPointer;
        };
        match monte_carlo(&cfg.inner, threads) {
            Ok(mc) => {
                let s = mc.stats;
                *out = SatqStats {
                    mean_f_eff: s.mean_f_eff,
                    mean_r_eff_bps: s.mean_r_eff_bps,
                    mean_path_len: s.mean_path_len,
                    mean_key_rate_bps: s.mean_key_rate_bps,
                    perf_index: s.perf_index,
                    std_f_eff: s.std_f_eff,
                    std_r_eff_bps: s.std_r_eff_bps,
                    std_path_len: s.std_path_len,
                    std_key_rate_bps: s.std_key_rate_bps,
                    availability: s.availability,
                    qber_compliant_fraction: s.qber_compliant_fraction,
                    mean_density_per_km3: mc.mean_density_per_km3,
                    n_routes: s.n_routes,
                    n_requests: s.n_requests,
                    run_count: s.run_count,
                };
                SatqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Empty graph on `n_nodes` nodes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_graph_new(n_nodes: usize, out: *mut *mut SatqGraph) -> SatqStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null");
            return SatqStatus::NullPointer;
        }
        *out = Box::into_raw(Box::new(SatqGraph {
            inner: WeightedGraph::new(n_nodes),
        }));
        SatqStatus::Ok
    })
}

/// Insert or replace the undirected edge `{i, j}`.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn satq_graph_add_edge(
    graph: *mut SatqGraph,
    i: usize,
    j: usize,
    cost: f64,
) -> SatqStatus {
    guarded(|| {
        let Some(g) = graph.as_mut() else {
            set_error("graph is null");
            return SatqStatus::NullPointer;
        };
        match g.inner.add_edge(i, j, cost) {
            Ok(()) => SatqStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `graph` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn satq_graph_free(graph: *mut SatqGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

unsafe fn write_path(
    path: Option<Path>,
    nodes_out: *mut usize,
    capacity: usize,
    len_out: *mut usize,
    cost_out: *mut f64,
) -> SatqStatus {
    let Some(p) = path else {
        set_error("no path between the requested nodes");
        return SatqStatus::NoPath;
    };
    *len_out = p.nodes.len();
    if !cost_out.is_null() {
        *cost_out = p.cost;
    }
    if p.nodes.len() > capacity {
        set_error(format!("path has {} nodes, buffer holds {capacity}", p.nodes.len()));
        return SatqStatus::BufferTooSmall;
    }
    if !p.nodes.is_empty() {
        if nodes_out.is_null() {
            set_error("nodes_out is null");
            return SatqStatus::NullPointer;
        }
        ptr::copy_nonoverlapping(p.nodes.as_ptr(), nodes_out, p.nodes.len());
    }
    SatqStatus::Ok
}

/// Minimum-cost path from `s` to `d`. Node ids are written to `nodes_out`
/// and the node count to `len_out`; on `BUFFER_TOO_SMALL` `len_out` still
/// holds the required capacity. `cost_out` may be NULL.
///
/// # Safety
/// `graph` must be a live handle, `nodes_out` valid for `capacity` writes,
/// `len_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn satq_shortest_path(
    graph: *const SatqGraph,
    s: usize,
    d: usize,
    nodes_out: *mut usize,
    capacity: usize,
    len_out: *mut usize,
    cost_out: *mut f64,
) -> SatqStatus {
    guarded(|| {
        let (Some(g), false) = (graph.as_ref(), len_out.is_null()) else {
            set_error("null argument");
            return SatqStatus::NullPointer;
        };
        match shortest_path(&g.inner, s, d) {
            Ok(p) => write_path(p, nodes_out, capacity, len_out, cost_out),
            Err(e) => fail(e),
        }
    })
}

/// Next-best simple path after the optimal one; same buffer contract as
/// [`satq_shortest_path`].
///
/// # Safety
/// As for [`satq_shortest_path`].
#[no_mangle]
pub unsafe extern "C" fn satq_second_path(
    graph: *const SatqGraph,
    s: usize,
    d: usize,
    nodes_out: *mut usize,
    capacity: usize,
    len_out: *mut usize,
    cost_out: *mut f64,
) -> SatqStatus {
    guarded(|| {
        let (Some(g), false) = (graph.as_ref(), len_out.is_null()) else {
            set_error("null argument");
            return SatqStatus::NullPointer;
        };
        let primary = match shortest_path(&g.inner, s, d) {
            Ok(Some(p)) => p,
            Ok(None) => return write_path(None, nodes_out, capacity, len_out, cost_out),
            Err(e) => return fail(e),
        };
        match second_path(&g.inner, s, d, &primary) {
            Ok(p) => write_path(p, nodes_out, capacity, len_out, cost_out),
            Err(e) => fail(e),
        }
    })
}
