//! C ABI over the core library.
//!
//! Every function returns an [`HseStatus`]; results come back through out
//! pointers. Handles are opaque and owned by the caller, who releases them
//! with the matching `*_free`. On failure, `hse_last_error` returns a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypersurface_energy::config::{RunConfig, ScenarioConfig, Tolerances};
use hypersurface_energy::energy::{classical_energy, surface_energy, trace};
use hypersurface_energy::experiments::{acceptance, report, run};
use hypersurface_energy::geometry::SurfaceSpec;
use hypersurface_energy::identities::{flux_balance, gronwall_coefficient_min};
use hypersurface_energy::solver::{solve, Scenario, SolveResult};
use hypersurface_energy::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    /// CFL violation, blow-up or a timelike surface.
    Numerical = 5,
    Io = 6,
    /// The requested quantity does not exist (e.g. no closed-form solution).
    Unavailable = 7,
    /// The destination buffer is too small.
    BufferTooSmall = 8,
    Panic = 9,
}

/// A catalog scenario built at a fixed resolution.
pub struct HseScenario {
    config: ScenarioConfig,
    scenario: Scenario,
}

/// A solved scenario.
pub struct HseSolution {
    scenario: Scenario,
    result: SolveResult,
}

/// A JSON report with its pass/fail verdict.
pub struct HseReport {
    json: CString,
    passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn classify(e: &Error) -> HseStatus {
    match e {
        Error::Config(_) | Error::UnknownScenario(_) | Error::Json(_) => HseStatus::Config,
        Error::Timelike { .. } | Error::Cfl { .. } | Error::NonFinite { .. } => HseStatus::Numerical,
        Error::Io(_) | Error::Csv(_) => HseStatus::Io,
        Error::NoAnalyticGradient | Error::NoAnalyticSource => HseStatus::Unavailable,
        _ => HseStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status and a thread-local message.
fn guard(f: impl FnOnce() -> Result<(), (HseStatus, String)>) -> HseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HseStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HseStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (HseStatus, String)>;
}

impl<T> Lift<T> for hypersurface_energy::Result<T> {
    fn lift(self) -> Result<T, (HseStatus, String)> {
        self.map_err(|e| (classify(&e), e.to_string()))
    }
}

fn null() -> (HseStatus, String) {
    (HseStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (HseStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (HseStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, (HseStatus, String)> {
    p.as_mut().ok_or_else(null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (HseStatus, String)> {
    p.as_ref().ok_or_else(null)
}

fn surface_spec(json: &str) -> Result<SurfaceSpec, (HseStatus, String)> {
    serde_json::from_str(json).map_err(|e| (HseStatus::Config, format!("surface: {e}")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn copy_out(msg: &CStr, buf: *mut c_char, len: usize, required: *mut usize) -> HseStatus {
    let bytes = msg.to_bytes_with_nul();
    if let Some(r) = required.as_mut() {
        *r = bytes.len();
    }
    if buf.is_null() || len < bytes.len() {
        return HseStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, bytes.len());
    HseStatus::Ok
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated).
/// `required` receives the buffer size needed, including the terminator.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn hse_last_error(buf: *mut c_char, len: usize, required: *mut usize) -> HseStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    copy_out(&msg, buf, len, required)
}

/// Builds a scenario from a catalog name or a scenario JSON object.
/// `cells == 0` keeps the scenario's default resolution.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hse_scenario_new(spec: *const c_char, cells: usize, out_scenario: *mut *mut HseScenario) -> HseStatus {
    guard(|| {
        let spec = text(spec)?;
        let dst = out(out_scenario)?;
        let config = if spec.trim_start().starts_with('{') {
            let c: ScenarioConfig = serde_json::from_str(spec).map_err(|e| (HseStatus::Config, e.to_string()))?;
            c.validate().lift()?;
            c
        } else {
            ScenarioConfig::load(spec).lift()?
        };
        let scenario = config.build((cells > 0).then_some(cells)).lift()?;
        *dst = Box::into_raw(Box::new(HseScenario { config, scenario }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from [`hse_scenario_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hse_scenario_free(scenario: *mut HseScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Spatial nodes and stored time levels of a scenario.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hse_scenario_dims(scenario: *const HseScenario, nodes: *mut usize, levels: *mut usize) -> HseStatus {
    guard(|| {
        let s = &handle(scenario)?.scenario;
        *out(nodes)? = s.grid.node_count();
        *out(levels)? = s.time.levels();
        Ok(())
    })
}

/// Hex SHA-256 of the scenario description (65 bytes with the terminator).
///
/// # Safety
/// `scenario` must be a live handle; `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hse_scenario_hash(scenario: *const HseScenario, buf: *mut c_char, len: usize, required: *mut usize) -> HseStatus {
    let Some(s) = scenario.as_ref() else {
        set_error("null pointer argument");
        return HseStatus::NullPointer;
    };
    let hash = CString::new(s.config.hash()).unwrap_or_default();
    copy_out(&hash, buf, len, required)
}

/// Classical energy `e(0)` of the scenario's initial data.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hse_scenario_initial_energy(scenario: *const HseScenario, energy: *mut f64) -> HseStatus {
    guard(|| {
        let s = &handle(scenario)?.scenario;
        *out(energy)? = classical_energy(&s.grid, &s.coefficients, &s.initial.u0, &s.initial.u1);
        Ok(())
    })
}

/// Solves a scenario with the leapfrog scheme.
///
/// # Safety
/// `scenario` must be a live handle; `out_solution` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hse_solve(scenario: *const HseScenario, out_solution: *mut *mut HseSolution) -> HseStatus {
    guard(|| {
        let s = handle(scenario)?;
        let dst = out(out_solution)?;
        let result = solve(&s.scenario).lift()?;
        *dst = Box::into_raw(Box::new(HseSolution { scenario: s.scenario.clone(), result }));
        Ok(())
    })
}

/// # Safety
/// `solution` must come from [`hse_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hse_solution_free(solution: *mut HseSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Max-norm error against the closed form; `Unavailable` when there is none.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hse_solution_max_error(solution: *const HseSolution, error: *mut f64) -> HseStatus {
    guard(|| {
        let s = handle(solution)?;
        let dst = out(error)?;
        *dst = s.result.max_error.ok_or((HseStatus::Unavailable, "scenario has no closed-form solution".into()))?;
        Ok(())
    })
}

/// `u` at (`level`, `node`) as real and imaginary parts.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hse_solution_value(solution: *const HseSolution, level: usize, node: usize, re: *mut f64, im: *mut f64) -> HseStatus {
    guard(|| {
        let u = &handle(solution)?.result.u;
        if level >= u.levels() || node >= u.nodes() {
            return Err((HseStatus::InvalidArgument, format!("(level {level}, node {node}) out of range")));
        }
        let v = u.at(level, node);
        *out(re)? = v.re;
        *out(im)? = v.im;
        Ok(())
    })
}

/// Energy on the surface given as JSON, e.g. `{"kind":"affine","offset":0.3,"slope":[0.4]}`.
///
/// # Safety
/// Pointers must be valid; `surface_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hse_surface_energy(solution: *const HseSolution, surface_json: *const c_char, energy: *mut f64) -> HseStatus {
    guard(|| {
        let s = handle(solution)?;
        let spec = surface_spec(text(surface_json)?)?;
        let dst = out(energy)?;
        let surf = spec.build(&s.scenario.grid, 0.0).lift()?;
        *dst = surface_energy(&trace(&s.result.u, &surf, 0.0).lift()?, &surf, &s.scenario.coefficients).lift()?;
        Ok(())
    })
}

/// Flux-balance residual at `tau` for the surface given as JSON.
///
/// # Safety
/// Pointers must be valid; `surface_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hse_flux_residual(solution: *const HseSolution, surface_json: *const c_char, tau: f64, residual: *mut f64) -> HseStatus {
    guard(|| {
        let s = handle(solution)?;
        let spec = surface_spec(text(surface_json)?)?;
        let dst = out(residual)?;
        let surf = spec.build(&s.scenario.grid, 0.0).lift()?;
        *dst = flux_balance(&s.result.u, &s.scenario, &surf, tau).lift()?.residual;
        Ok(())
    })
}

/// Minimizer and minimum of the Grönwall coefficient for `d > 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hse_gronwall_min(d: f64, k_star: *mut f64, value: *mut f64) -> HseStatus {
    guard(|| {
        let m = gronwall_coefficient_min(d).lift()?;
        *out(k_star)? = m.k_star;
        *out(value)? = m.value;
        Ok(())
    })
}

fn boxed_report(json: serde_json::Value, passed: bool) -> Result<*mut HseReport, (HseStatus, String)> {
    let text = serde_json::to_string_pretty(&json).map_err(|e| (HseStatus::Io, e.to_string()))?;
    let json = CString::new(text).map_err(|e| (HseStatus::Io, e.to_string()))?;
    Ok(Box::into_raw(Box::new(HseReport { json, passed })))
}

/// Runs a complete run configuration (JSON) without writing files.
///
/// # Safety
/// Pointers must be valid; `config_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hse_run(config_json: *const c_char, out_report: *mut *mut HseReport) -> HseStatus {
    guard(|| {
        let cfg = RunConfig::from_json(text(config_json)?).lift()?;
        let dst = out(out_report)?;
        let outcome = run(&cfg).lift()?;
        *dst = boxed_report(report(&cfg, &outcome), outcome.passed())?;
        Ok(())
    })
}

/// Runs acceptance criterion `n` (1 to 10) with default tolerances.
///
/// # Safety
/// `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hse_acceptance(n: u32, seed: u64, out_report: *mut *mut HseReport) -> HseStatus {
    guard(|| {
        let dst = out(out_report)?;
        let o = acceptance::criterion(n as usize, &Tolerances::default(), seed).lift()?;
        let json = serde_json::json!({ "criterion": n, "checks": o.checks, "results": o.results });
        *dst = boxed_report(json, o.passed())?;
        Ok(())
    })
}

/// Whether every check in the report passed.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hse_report_passed(report: *const HseReport) -> bool {
    report.as_ref().is_some_and(|r| r.passed)
}

/// Report JSON, valid until [`hse_report_free`]; null for a null handle.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hse_report_json(report: *const HseReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hse_report_free(report: *mut HseReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_statuses() {
        assert_eq!(classify(&Error::Config("x".into())), HseStatus::Config);
        assert_eq!(classify(&Error::Timelike { max_slope: 2.0 }), HseStatus::Numerical);
        assert_eq!(classify(&Error::NoAnalyticGradient), HseStatus::Unavailable);
        assert_eq!(classify(&Error::GridMismatch), HseStatus::InvalidArgument);
    }

    #[test]
    fn panics_are_contained() {
        assert_eq!(guard(|| panic!("boom")), HseStatus::Panic);
    }
}
