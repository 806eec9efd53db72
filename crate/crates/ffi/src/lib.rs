//! C ABI over the `navsim` kernel.
//!
//! Objects cross the boundary as opaque handles created and released by
//! this library. Every fallible call returns a [`NavsimStatus`]; on failure
//! a description is available from [`navsim_last_error`] on the same thread.
//! Panics never unwind into C: they are reported as `NAVSIM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use navsim::config::{CliConfig, Overrides};
use navsim::error::NavError;
use navsim::imu::{scrolling_iu, sculling_u, ImuInterval};
use navsim::navigator::{self, AttitudeSource, RunConfig, RunResult};
use navsim::report;
use navsim::scenario::{Scenario, ScenarioKind};
use navsim::so3::{Dcm, Vec3};
use navsim::updates::Algorithm;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    NumericalError = 4,
    IoError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavsimAlgorithm {
    Derived = 0,
    Tn = 1,
    Sv1 = 2,
    Sv2 = 3,
}

impl From<NavsimAlgorithm> for Algorithm {
    fn from(a: NavsimAlgorithm) -> Self {
        match a {
            NavsimAlgorithm::Derived => Algorithm::Derived,
            NavsimAlgorithm::Tn => Algorithm::Tn,
            NavsimAlgorithm::Sv1 => Algorithm::Sv1,
            NavsimAlgorithm::Sv2 => Algorithm::Sv2,
        }
    }
}

/// Opaque scenario handle.
pub struct NavsimScenario(Scenario);

/// Opaque handle to a finished run.
pub struct NavsimRunResult(RunResult);

/// Headline numbers of a run. Errors are estimate minus truth, components
/// ordered north, up, east.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NavsimSummary {
    pub epochs: usize,
    pub max_horiz_pos_err_m: f64,
    pub max_horiz_vel_err_mps: f64,
    pub final_horiz_pos_err_m: f64,
    pub final_vel_err_mps: [f64; 3],
    pub final_pos_err_m: [f64; 3],
    pub max_abs_vert_vel_err_mps: f64,
    pub max_dcm_orthonormality_error: f64,
}

/// Errors at one epoch.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NavsimEpoch {
    pub t_s: f64,
    pub vel_err_mps: [f64; 3],
    pub pos_err_m: [f64; 3],
    pub horiz_pos_err_m: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(NavsimStatus, String);

impl From<NavError> for Fail {
    fn from(e: NavError) -> Self {
        let status = match e {
            NavError::InvalidScenario(_) | NavError::InvalidArgument(_) | NavError::MixedScenarios => {
                NavsimStatus::InvalidArgument
            }
            _ => NavsimStatus::NumericalError,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NavsimStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NavsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            NavsimStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            NavsimStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail(NavsimStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(Path::new(s))
}

/// # Safety
/// `p` must be null or point at 3 readable doubles.
unsafe fn vec3_arg(p: *const f64, what: &str) -> Result<Vec3, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(Vec3::from_column_slice(unsafe { std::slice::from_raw_parts(p, 3) }))
}

fn store_scenario(s: Scenario, out: *mut *mut NavsimScenario) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    s.validate()?;
    unsafe { *out = Box::into_raw(Box::new(NavsimScenario(s))) };
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn navsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn navsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Scenario A: 500 m/s due east at 30° latitude, T = 0.02 s, one hour.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_a(out: *mut *mut NavsimScenario) -> NavsimStatus {
    guard(|| store_scenario(Scenario::const_east_default(), out))
}

/// Scenario B: east acceleration 10 sin(0.02πt) m/s², two hours.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_b(out: *mut *mut NavsimScenario) -> NavsimStatus {
    guard(|| store_scenario(Scenario::sine_east_default(), out))
}

/// Level flight due east. `accel_mps2 = 0` gives constant speed; otherwise
/// the east acceleration is `accel_mps2 sin(omega_rad_s t)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_new(
    lat_deg: f64,
    ve0_mps: f64,
    accel_mps2: f64,
    omega_rad_s: f64,
    duration_s: f64,
    dt_s: f64,
    out: *mut *mut NavsimScenario,
) -> NavsimStatus {
    guard(|| {
        let kind = if accel_mps2 == 0.0 {
            ScenarioKind::ConstEast
        } else {
            ScenarioKind::SineEast { accel: accel_mps2, omega: omega_rad_s }
        };
        let s = Scenario {
            kind,
            lat0: lat_deg.to_radians(),
            ve0: ve0_mps,
            duration: duration_s,
            dt: dt_s,
            ..Scenario::const_east_default()
        };
        store_scenario(s, out)
    })
}

/// Scenario from a TOML file in the command-line format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_from_config(path: *const c_char, out: *mut *mut NavsimScenario) -> NavsimStatus {
    guard(|| {
        let path = unsafe { path_arg(path)? };
        let cfg = CliConfig::load(path).map_err(|e| Fail(NavsimStatus::ConfigError, e.to_string()))?;
        let s = cfg.scenario(Overrides::default()).map_err(|e| Fail(NavsimStatus::ConfigError, e.to_string()))?;
        store_scenario(s, out)
    })
}

/// Number of update intervals in the scenario.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_steps(scenario: *const NavsimScenario) -> usize {
    unsafe { scenario.as_ref() }.map_or(0, |s| s.0.steps())
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn navsim_scenario_free(scenario: *mut NavsimScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Runs one velocity/position algorithm pair over the scenario.
/// `truth_attitude` replaces the gyro-propagated attitude with the truth
/// every interval.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_run(
    scenario: *const NavsimScenario,
    vel_alg: NavsimAlgorithm,
    pos_alg: NavsimAlgorithm,
    truth_attitude: bool,
    out: *mut *mut NavsimRunResult,
) -> NavsimStatus {
    guard(|| {
        let s = unsafe { deref(scenario, "scenario")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig {
            scenario: s.0,
            vel_alg: vel_alg.into(),
            pos_alg: pos_alg.into(),
            attitude_source: if truth_attitude { AttitudeSource::TruthAttitude } else { AttitudeSource::IntegrateGyro },
        };
        let result = navigator::run(&cfg)?;
        unsafe { *out = Box::into_raw(Box::new(NavsimRunResult(result))) };
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_run_summary(result: *const NavsimRunResult, out: *mut NavsimSummary) -> NavsimStatus {
    guard(|| {
        let r = unsafe { deref(result, "result")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let s = &r.0.summary;
        let summary = NavsimSummary {
            epochs: r.0.records.len(),
            max_horiz_pos_err_m: s.max_horiz_pos_err,
            max_horiz_vel_err_mps: s.max_horiz_vel_err,
            final_horiz_pos_err_m: s.final_horiz_pos_err,
            final_vel_err_mps: s.final_v_err.into(),
            final_pos_err_m: s.final_p_err.into(),
            max_abs_vert_vel_err_mps: s.max_abs_vert_vel_err,
            max_dcm_orthonormality_error: s.max_dcm_orthonormality_error,
        };
        unsafe { *out = summary };
        Ok(())
    })
}

/// Errors at epoch `k` (0 is the initial state).
///
/// # Safety
/// `result` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn navsim_run_epoch(result: *const NavsimRunResult, k: usize, out: *mut NavsimEpoch) -> NavsimStatus {
    guard(|| {
        let r = unsafe { deref(result, "result")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let e = r.0.records.get(k).ok_or_else(|| {
            Fail(NavsimStatus::InvalidArgument, format!("epoch {k} out of range (run has {})", r.0.records.len()))
        })?;
        unsafe {
            *out = NavsimEpoch { t_s: e.t, vel_err_mps: e.v_err.into(), pos_err_m: e.p_err.into(), horiz_pos_err_m: e.p_err_horiz }
        };
        Ok(())
    })
}

/// Writes the error series in the command-line CSV format.
///
/// # Safety
/// `result` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn navsim_run_write_csv(result: *const NavsimRunResult, path: *const c_char) -> NavsimStatus {
    guard(|| {
        let r = unsafe { deref(result, "result")? };
        let path = unsafe { path_arg(path)? };
        let io = |e: std::io::Error| Fail(NavsimStatus::IoError, format!("{}: {e}", path.display()));
        let f = File::create(path).map_err(io)?;
        report::write_series_csv(f, &r.0.records).map_err(io)
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn navsim_run_free(result: *mut NavsimRunResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// # Safety
/// Every pointer must be null or reference 3 doubles.
unsafe fn imu_call(
    dtheta1: *const f64,
    dtheta2: *const f64,
    dv1: *const f64,
    dv2: *const f64,
    dt: f64,
    out: *mut f64,
    f: fn(&Dcm, &ImuInterval) -> Vec3,
) -> NavsimStatus {
    guard(|| {
        let imu = unsafe {
            ImuInterval::new(
                vec3_arg(dtheta1, "dtheta1")?,
                vec3_arg(dtheta2, "dtheta2")?,
                vec3_arg(dv1, "dv1")?,
                vec3_arg(dv2, "dv2")?,
                dt,
            )?
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let r = f(&Dcm::identity(), &imu);
        unsafe { std::slice::from_raw_parts_mut(out, 3).copy_from_slice(r.as_slice()) };
        Ok(())
    })
}

/// Sculling-corrected velocity increment in the body frame at the start of
/// the interval, from two half-interval gyro (rad) and accelerometer (m/s)
/// increments.
///
/// # Safety
/// Every pointer must reference 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn navsim_sculling(
    dtheta1: *const f64,
    dtheta2: *const f64,
    dv1: *const f64,
    dv2: *const f64,
    dt: f64,
    out: *mut f64,
) -> NavsimStatus {
    unsafe { imu_call(dtheta1, dtheta2, dv1, dv2, dt, out, sculling_u) }
}

/// Scrolling double integral (m) in the body frame at the start of the
/// interval.
///
/// # Safety
/// Every pointer must reference 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn navsim_scrolling(
    dtheta1: *const f64,
    dtheta2: *const f64,
    dv1: *const f64,
    dv2: *const f64,
    dt: f64,
    out: *mut f64,
) -> NavsimStatus {
    unsafe { imu_call(dtheta1, dtheta2, dv1, dv2, dt, out, scrolling_iu) }
}
