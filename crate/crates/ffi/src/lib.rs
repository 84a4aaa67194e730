//! C interface to the fleetcover planner.
//!
//! Scenarios and results are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an `FcStatus`;
//! the message of the last failure on the calling thread is available from
//! `fc_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fleetcover::geom::Point2;
use fleetcover::harness::{
    bundled_scenario, load_scenario, metrics_json, run_pipeline, scenario_from_parts, PipelineResult, Scenario,
    ScenarioConfig,
};
use fleetcover::Error;

/// Result codes. The nonzero values match the exit codes of the command line
/// tool, with `INTERNAL` added for panics and invalid handles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    InvalidArgument = 1,
    InfeasibleWorkspace = 2,
    Unreachable = 3,
    ParseError = 4,
    Internal = 5,
}

/// A planning problem: region, exclusion zones and parameters.
pub struct FcScenario(Scenario);

/// The plans, metrics and allocation of one planner run.
pub struct FcPlanResult(PipelineResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FcStatus {
    match e.exit_code() {
        2 => FcStatus::InfeasibleWorkspace,
        3 => FcStatus::Unreachable,
        4 => FcStatus::ParseError,
        _ => FcStatus::InvalidArgument,
    }
}

struct Fail(FcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(FcStatus::InvalidArgument, msg.into())
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal error: {msg}"));
            FcStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn scenario_mut<'a>(sc: *mut FcScenario) -> Result<&'a mut Scenario, Fail> {
    sc.as_mut().map(|s| &mut s.0).ok_or_else(|| invalid("scenario handle is null"))
}

unsafe fn result_ref<'a>(r: *const FcPlanResult) -> Result<&'a PipelineResult, Fail> {
    r.as_ref().map(|r| &r.0).ok_or_else(|| invalid("result handle is null"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Applies `change` and keeps it only if the scenario still validates.
unsafe fn update(sc: *mut FcScenario, change: impl FnOnce(&mut Scenario)) -> FcStatus {
    guard(|| {
        let s = scenario_mut(sc)?;
        let mut next = s.clone();
        change(&mut next);
        next.validate()?;
        *s = next;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a GeoJSON scenario file and its `<stem>.config.json` sidecar.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_load(path: *const c_char, out: *mut *mut FcScenario) -> FcStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        put(out, FcScenario(load_scenario(Path::new(path))?))
    })
}

/// One of the scenarios compiled into the library ("rect", "cape", ...).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_bundled(name: *const c_char, out: *mut *mut FcScenario) -> FcStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        put(out, FcScenario(bundled_scenario(name)?))
    })
}

/// Scenario from GeoJSON text and an optional JSON parameter object with the
/// same keys as a sidecar file. `config_json` may be null, but the swath
/// width must then be set before the call succeeds, so pass at least
/// `{"swath_width": w}`.
///
/// # Safety
/// `geojson` and a non-null `config_json` must be NUL-terminated strings;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_from_geojson(
    geojson: *const c_char,
    config_json: *const c_char,
    out: *mut *mut FcScenario,
) -> FcStatus {
    guard(|| {
        let text = read_str(geojson, "geojson")?;
        let config = if config_json.is_null() {
            ScenarioConfig::default()
        } else {
            ScenarioConfig::parse(read_str(config_json, "config_json")?)?
        };
        put(out, FcScenario(scenario_from_parts("scenario", text, &config)?))
    })
}

/// # Safety
/// `sc` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_robots(sc: *mut FcScenario, n_robots: usize) -> FcStatus {
    update(sc, |s| s.n_robots = n_robots)
}

/// # Safety
/// `sc` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_swath_width(sc: *mut FcScenario, width: f64) -> FcStatus {
    update(sc, |s| s.swath_width = width)
}

/// Buffer distance as a multiple of the swath width.
///
/// # Safety
/// `sc` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_buffer_scale(sc: *mut FcScenario, scale: f64) -> FcStatus {
    update(sc, |s| s.buffer_scale = scale)
}

/// # Safety
/// `sc` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_depot(sc: *mut FcScenario, x: f64, y: f64) -> FcStatus {
    if !(x.is_finite() && y.is_finite()) {
        set_error("depot coordinates must be finite");
        return FcStatus::InvalidArgument;
    }
    update(sc, |s| s.depot = Some(Point2::new(x, y)))
}

/// # Safety
/// `sc` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_seed(sc: *mut FcScenario, seed: u64) -> FcStatus {
    update(sc, |s| s.seed = seed)
}

/// Sweep direction strategy: "mar", "scan", "pca" or "minwidth".
///
/// # Safety
/// `sc` must be a handle from this library or null; `name` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_set_orientation(sc: *mut FcScenario, name: *const c_char) -> FcStatus {
    guard(|| {
        let strategy = read_str(name, "name")?.parse()?;
        scenario_mut(sc)?.orientation = strategy;
        Ok(())
    })
}

/// # Safety
/// `sc` must be a handle from this library or null, and not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fc_scenario_free(sc: *mut FcScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Runs the planner. The scenario is not modified and may be reused.
///
/// # Safety
/// `sc` must be a handle from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_plan(sc: *const FcScenario, out: *mut *mut FcPlanResult) -> FcStatus {
    guard(|| {
        let s = sc.as_ref().ok_or_else(|| invalid("scenario handle is null"))?;
        put(out, FcPlanResult(run_pipeline(&s.0)?))
    })
}

/// Number of robots with a plan; 0 for a null handle.
///
/// # Safety
/// `r` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_result_robot_count(r: *const FcPlanResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.plans.len())
}

/// # Safety
/// `r` must be a handle from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_result_waypoint_count(r: *const FcPlanResult, robot: usize, out: *mut usize) -> FcStatus {
    guard(|| {
        let plan = result_ref(r)?
            .plans
            .get(robot)
            .ok_or_else(|| invalid(format!("no robot {robot}")))?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *out = plan.waypoints.len();
        Ok(())
    })
}

/// Copies the waypoints of one robot as interleaved x, y pairs into `xy`,
/// which must hold `2 * capacity` doubles. Fails without writing if the
/// plan has more than `capacity` waypoints.
///
/// # Safety
/// `r` must be a handle from this library and `xy` must point to
/// `2 * capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_result_copy_waypoints(
    r: *const FcPlanResult,
    robot: usize,
    xy: *mut f64,
    capacity: usize,
) -> FcStatus {
    guard(|| {
        let plan = result_ref(r)?
            .plans
            .get(robot)
            .ok_or_else(|| invalid(format!("no robot {robot}")))?;
        let n = plan.waypoints.len();
        if n > capacity {
            return Err(invalid(format!("buffer holds {capacity} waypoints, plan has {n}")));
        }
        if xy.is_null() {
            return Err(invalid("waypoint buffer is null"));
        }
        let buf = std::slice::from_raw_parts_mut(xy, 2 * n);
        for (k, q) in plan.waypoints.iter().enumerate() {
            buf[2 * k] = q.x;
            buf[2 * k + 1] = q.y;
        }
        Ok(())
    })
}

/// Fleet energy in Wh; NaN for a null handle.
///
/// # Safety
/// `r` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_result_total_energy_wh(r: *const FcPlanResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.metrics.fleet.total_energy_wh)
}

/// The metrics document written by the command line tool, as a new string
/// to be released with `fc_string_free`. Null on failure.
///
/// # Safety
/// `r` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_result_metrics_json(r: *const FcPlanResult) -> *mut c_char {
    let mut text = None;
    let status = guard(|| {
        let json = metrics_json(result_ref(r)?);
        text = Some(CString::new(json).map_err(|_| Fail(FcStatus::Internal, "metrics contain NUL".into()))?);
        Ok(())
    });
    match (status, text) {
        (FcStatus::Ok, Some(c)) => c.into_raw(),
        _ => ptr::null_mut(),
    }
}

/// # Safety
/// `r` must be a handle from this library or null, and not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fc_result_free(r: *mut FcPlanResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be a string returned by this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
