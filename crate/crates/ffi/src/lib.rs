//! C interface to the freight assignment engine.
//!
//! Every fallible call returns an [`FaStatus`]. On failure a description is
//! available from [`fa_last_error_message`] on the same thread until the
//! next failing call. Handles are opaque and owned by the caller, who
//! releases them with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use freight_assign::equilibrium::{Algorithm, EquilibriumError};
use freight_assign::io::{read_demand_csv, read_network, IngestOptions, IoError};
use freight_assign::lpf::{LpfError, RailLpf, RoadLpf};
use freight_assign::{solve_fw, solve_gp, AssignmentResult, DemandTable, Network, SolverConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidNetwork = 4,
    InvalidDemand = 5,
    Unreachable = 6,
    InvalidConfig = 7,
    NotFound = 8,
    BufferTooSmall = 9,
    InvalidArgument = 10,
    Solver = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaAlgorithm {
    GradientProjection = 0,
    FrankWolfe = 1,
}

/// Solver settings. Start from [`fa_solver_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FaSolverConfig {
    pub step_size: f64,
    pub rel_gap_tol: f64,
    pub max_iterations: u64,
    pub beta: f64,
    pub intermodal_road_factor: f64,
    pub intermodal_rail_factor: f64,
    pub normalization: bool,
}

impl From<&SolverConfig> for FaSolverConfig {
    fn from(c: &SolverConfig) -> Self {
        FaSolverConfig {
            step_size: c.step_size,
            rel_gap_tol: c.rel_gap_tol,
            max_iterations: c.max_iterations as u64,
            beta: c.beta,
            intermodal_road_factor: c.intermodal_road_factor,
            intermodal_rail_factor: c.intermodal_rail_factor,
            normalization: c.normalization,
        }
    }
}

impl FaSolverConfig {
    fn to_config(self) -> Result<SolverConfig, Failure> {
        let max_iterations = usize::try_from(self.max_iterations)
            .map_err(|_| Failure(FaStatus::InvalidConfig, "max_iterations does not fit in usize".into()))?;
        Ok(SolverConfig {
            step_size: self.step_size,
            rel_gap_tol: self.rel_gap_tol,
            max_iterations,
            beta: self.beta,
            intermodal_road_factor: self.intermodal_road_factor,
            intermodal_rail_factor: self.intermodal_rail_factor,
            normalization: self.normalization,
        })
    }
}

pub struct FaNetwork(Network);

pub struct FaDemand(DemandTable);

pub struct FaResult {
    result: AssignmentResult,
    link_ids: Vec<String>,
}

struct Failure(FaStatus, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Network(_) => FaStatus::InvalidNetwork,
            IoError::Demand(_) => FaStatus::InvalidDemand,
            _ => FaStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

impl From<EquilibriumError> for Failure {
    fn from(e: EquilibriumError) -> Self {
        let status = match e {
            EquilibriumError::Network(_) => FaStatus::InvalidNetwork,
            EquilibriumError::Demand(_) => FaStatus::InvalidDemand,
            EquilibriumError::Unreachable(_) => FaStatus::Unreachable,
            EquilibriumError::InvalidConfig(_) => FaStatus::InvalidConfig,
            _ => FaStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

impl From<LpfError> for Failure {
    fn from(e: LpfError) -> Self {
        Failure(FaStatus::InvalidArgument, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            FaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(FaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FaStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message of the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn fa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Reads a network from a directory of `nodes.csv` and `links.csv` or
/// from a `.json` file, and validates it.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_network_load(path: *const c_char, out: *mut *mut FaNetwork) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let path = text(path, "path")?;
        let net = read_network(Path::new(path), &IngestOptions::default())?;
        let report = net.validate();
        if !report.is_valid() {
            return Err(Failure(FaStatus::InvalidNetwork, report.to_string()));
        }
        *out = Box::into_raw(Box::new(FaNetwork(net)));
        Ok(())
    })
}

/// # Safety
/// `net` must come from [`fa_network_load`] and not be freed twice. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn fa_network_free(net: *mut FaNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of links, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn fa_network_link_count(net: *const FaNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.links().len())
}

/// Position of link `id` in flow arrays.
///
/// # Safety
/// `net` must be a live handle, `id` a NUL-terminated string and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_network_link_index(net: *const FaNetwork, id: *const c_char, out: *mut usize) -> FaStatus {
    guard(|| {
        let net = borrow(net, "net")?;
        let id = text(id, "id")?;
        let out = out_ptr(out, "out")?;
        *out = net.0.link_ix(id).ok_or_else(|| Failure(FaStatus::NotFound, format!("no link '{id}'")))?;
        Ok(())
    })
}

/// Reads a demand table CSV with columns origin, destination, q_truck,
/// q_rail and q_intermodal.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_demand_load(path: *const c_char, out: *mut *mut FaDemand) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let path = text(path, "path")?;
        let table = read_demand_csv(Path::new(path))?;
        *out = Box::into_raw(Box::new(FaDemand(table)));
        Ok(())
    })
}

/// # Safety
/// `demand` must come from [`fa_demand_load`] and not be freed twice.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fa_demand_free(demand: *mut FaDemand) {
    if !demand.is_null() {
        drop(Box::from_raw(demand));
    }
}

#[no_mangle]
pub extern "C" fn fa_solver_config_default() -> FaSolverConfig {
    FaSolverConfig::from(&SolverConfig::default())
}

/// Solves for user equilibrium. A null `config` uses the defaults. Hitting
/// the iteration limit is not a failure; check [`fa_result_converged`].
///
/// # Safety
/// `net` and `demand` must be live handles, `config` null or valid, and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_solve(
    net: *const FaNetwork,
    demand: *const FaDemand,
    config: *const FaSolverConfig,
    algorithm: FaAlgorithm,
    out: *mut *mut FaResult,
) -> FaStatus {
    guard(|| {
        let net = borrow(net, "net")?;
        let demand = borrow(demand, "demand")?;
        let out = out_ptr(out, "out")?;
        let cfg = match config.as_ref() {
            Some(c) => c.to_config()?,
            None => SolverConfig::default(),
        };
        let result = match algorithm {
            FaAlgorithm::GradientProjection => solve_gp(&net.0, &demand.0, &cfg)?,
            FaAlgorithm::FrankWolfe => solve_fw(&net.0, &demand.0, &cfg)?,
        };
        let link_ids = net.0.links().iter().map(|l| l.id.clone()).collect();
        *out = Box::into_raw(Box::new(FaResult { result, link_ids }));
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`fa_solve`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn fa_result_free(result: *mut FaResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fa_result_algorithm(result: *const FaResult) -> FaAlgorithm {
    match result.as_ref().map(|r| r.result.algorithm) {
        Some(Algorithm::FrankWolfe) => FaAlgorithm::FrankWolfe,
        _ => FaAlgorithm::GradientProjection,
    }
}

/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fa_result_iterations(result: *const FaResult) -> u64 {
    result.as_ref().map_or(0, |r| r.result.iterations as u64)
}

/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fa_result_converged(result: *const FaResult) -> bool {
    result.as_ref().is_some_and(|r| r.result.converged)
}

/// Objective in vehicle-hours per day and demand-normalized hours.
///
/// # Safety
/// `result` must be a live handle; `raw` and `normalized` writable or
/// null.
#[no_mangle]
pub unsafe extern "C" fn fa_result_objective(result: *const FaResult, raw: *mut f64, normalized: *mut f64) -> FaStatus {
    guard(|| {
        let r = borrow(result, "result")?;
        if let Some(raw) = raw.as_mut() {
            *raw = r.result.objective.raw;
        }
        if let Some(n) = normalized.as_mut() {
            *n = r.result.objective.normalized;
        }
        Ok(())
    })
}

/// Copies link flows in network link order into `buf`, which must hold
/// [`fa_network_link_count`] values.
///
/// # Safety
/// `result` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fa_result_link_flows(result: *const FaResult, buf: *mut f64, len: usize) -> FaStatus {
    guard(|| {
        let r = borrow(result, "result")?;
        let flows = &r.result.link_flows;
        if len < flows.len() {
            return Err(Failure(FaStatus::BufferTooSmall, format!("buffer holds {len} values, need {}", flows.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        std::slice::from_raw_parts_mut(buf, flows.len()).copy_from_slice(flows);
        Ok(())
    })
}

/// Flow on link `id`.
///
/// # Safety
/// `result` must be a live handle, `id` a NUL-terminated string and `out`
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_result_link_flow(result: *const FaResult, id: *const c_char, out: *mut f64) -> FaStatus {
    guard(|| {
        let r = borrow(result, "result")?;
        let id = text(id, "id")?;
        let out = out_ptr(out, "out")?;
        let ix = r
            .link_ids
            .iter()
            .position(|l| l == id)
            .ok_or_else(|| Failure(FaStatus::NotFound, format!("no link '{id}'")))?;
        *out = r.result.link_flows[ix];
        Ok(())
    })
}

/// Road travel time in hours at flow `x`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_road_time(t0: f64, capacity: f64, x: f64, out: *mut f64) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = RoadLpf::new(t0, capacity)?.time(x)?;
        Ok(())
    })
}

/// Integral of the road travel time from 0 to `x`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_road_time_integral(t0: f64, capacity: f64, x: f64, out: *mut f64) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = RoadLpf::new(t0, capacity)?.integral(x)?;
        Ok(())
    })
}

/// Rail travel time in hours with own-direction flow `x` and opposing
/// flow `x_opp` on the shared track.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_rail_time(
    t0: f64,
    capacity: f64,
    beta: f64,
    x: f64,
    x_opp: f64,
    out: *mut f64,
) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = RailLpf::new(t0, capacity, beta)?.time(x, x_opp)?;
        Ok(())
    })
}

/// Integral of the rail travel time from 0 to combined flow `y`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fa_rail_time_integral(t0: f64, capacity: f64, beta: f64, y: f64, out: *mut f64) -> FaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = RailLpf::new(t0, capacity, beta)?.integral(y)?;
        Ok(())
    })
}
