//! C ABI over the `geophase` library.
//!
//! Schedules are handed out as opaque `GpSchedule` pointers and must be
//! released with `gp_schedule_free`. Every fallible call returns a
//! `GpStatus`; on failure `gp_last_error` describes the problem. Strings
//! returned by the library are released with `gp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geophase::engine::{gate_fidelity, lindblad_evolve, propagate_unitary, EngineConfig, ErrorModel, TwoLevel};
use geophase::harness::NamedGate;
use geophase::{build, Error, GateParams, Operator, Schedule, Scheme};
use num_complex::Complex64;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullPointer = 1,
    /// Rejected input: bad gate, scheme, error model, state or JSON.
    InvalidArgument = 2,
    /// The numerics failed, e.g. trace drift in a master-equation run.
    Numerical = 3,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque pulse schedule.
pub struct GpSchedule(Schedule);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: GpStatus, msg: &str) -> GpStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> GpStatus {
    let status = if e.is_validation() {
        GpStatus::InvalidArgument
    } else {
        GpStatus::Numerical
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> GpStatus) -> GpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == GpStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(GpStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, GpStatus> {
    if p.is_null() {
        return Err(fail(GpStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GpStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn schedule_arg<'a>(p: *const GpSchedule) -> Result<&'a Schedule, GpStatus> {
    p.as_ref()
        .map(|s| &s.0)
        .ok_or_else(|| fail(GpStatus::NullPointer, "null schedule"))
}

fn parse_scheme(s: &str) -> Result<Scheme, GpStatus> {
    s.parse().map_err(from_error)
}

unsafe fn store_schedule(schedule: Schedule, out: *mut *mut GpSchedule) -> GpStatus {
    *out = Box::into_raw(Box::new(GpSchedule(schedule)));
    GpStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the schedule of `e^{iγ n·σ}` with the given scheme name
/// (`singleloop`, `composite`, `composite(N)`, `dyncorrected`).
///
/// # Safety
/// `scheme` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_new(
    theta: f64,
    phi: f64,
    gamma: f64,
    scheme: *const c_char,
    out: *mut *mut GpSchedule,
) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let scheme = tri!(parse_scheme(tri!(str_arg(scheme))));
        let gate = tri!(GateParams::new(theta, phi, gamma).map_err(from_error));
        store_schedule(tri!(build(gate, scheme).map_err(from_error)), out)
    })
}

/// Builds the schedule of a named single-qubit gate (`S`, `T`, `H`).
///
/// # Safety
/// `gate` and `scheme` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_named(
    gate: *const c_char,
    scheme: *const c_char,
    out: *mut *mut GpSchedule,
) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let name: NamedGate = tri!(tri!(str_arg(gate)).parse().map_err(from_error));
        let Some(params) = name.params() else {
            return fail(GpStatus::InvalidArgument, "U2 has no single-qubit schedule");
        };
        let scheme = tri!(parse_scheme(tri!(str_arg(scheme))));
        store_schedule(tri!(build(params, scheme).map_err(from_error)), out)
    })
}

/// Parses a schedule from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_from_json(json: *const c_char, out: *mut *mut GpSchedule) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let s = tri!(Schedule::from_json(tri!(str_arg(json))).map_err(from_error));
        store_schedule(s, out)
    })
}

/// Releases a schedule. Null is ignored.
///
/// # Safety
/// `schedule` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_free(schedule: *mut GpSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Number of segments; 0 for a null schedule.
///
/// # Safety
/// `schedule` must be null or a live schedule.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_segment_count(schedule: *const GpSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.0.segments.len())
}

/// Total duration in units of `1/Ω_m`; NaN for a null schedule.
///
/// # Safety
/// `schedule` must be null or a live schedule.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_duration(schedule: *const GpSchedule) -> f64 {
    schedule.as_ref().map_or(f64::NAN, |s| s.0.total_duration())
}

/// Serializes the schedule; release the string with `gp_string_free`.
///
/// # Safety
/// `schedule` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_schedule_to_json(schedule: *const GpSchedule, out: *mut *mut c_char) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let json = tri!(tri!(schedule_arg(schedule)).to_json().map_err(from_error));
        match CString::new(json) {
            Ok(c) => {
                *out = c.into_raw();
                GpStatus::Ok
            }
            Err(_) => fail(GpStatus::Numerical, "JSON contained a NUL byte"),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn closed_propagator(schedule: &Schedule, epsilon: f64, delta: f64) -> Result<Operator, GpStatus> {
    let r = propagate_unitary(
        &TwoLevel,
        schedule,
        &ErrorModel::coherent(epsilon, delta),
        None,
        &EngineConfig::default(),
    )
    .map_err(from_error)?;
    Ok(r.propagator().expect("unitary run").clone())
}

/// Writes the 2×2 propagator under Rabi error `epsilon` and detuning shift
/// `delta` as 8 doubles: row-major entries, each as (re, im).
///
/// # Safety
/// `schedule` must be live; `out` must hold 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn gp_propagator(
    schedule: *const GpSchedule,
    epsilon: f64,
    delta: f64,
    out: *mut f64,
) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let u = tri!(closed_propagator(tri!(schedule_arg(schedule)), epsilon, delta));
        for (k, z) in u.entries().iter().enumerate() {
            *out.add(2 * k) = z.re;
            *out.add(2 * k + 1) = z.im;
        }
        GpStatus::Ok
    })
}

/// Gate fidelity `|Tr(V†U)|/2` against the schedule's target gate.
///
/// # Safety
/// `schedule` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_gate_fidelity(
    schedule: *const GpSchedule,
    epsilon: f64,
    delta: f64,
    out: *mut f64,
) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return fail(GpStatus::NullPointer, "null output pointer");
        }
        let s = tri!(schedule_arg(schedule));
        let u = tri!(closed_propagator(s, epsilon, delta));
        *out = tri!(gate_fidelity(&u, &s.gate.target()).map_err(from_error));
        GpStatus::Ok
    })
}

/// Runs the master equation from the pure state `psi` (4 doubles:
/// re0, im0, re1, im1) and writes the final fidelity with the ideal output
/// state.
///
/// # Safety
/// `schedule` must be live; `psi` must hold 4 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_lindblad_state_fidelity(
    schedule: *const GpSchedule,
    epsilon: f64,
    delta: f64,
    gamma1: f64,
    gamma2: f64,
    psi: *const f64,
    out: *mut f64,
) -> GpStatus {
    guard(|| {
        if out.is_null() || psi.is_null() {
            return fail(GpStatus::NullPointer, "null pointer argument");
        }
        let s = tri!(schedule_arg(schedule));
        let state = [
            Complex64::new(*psi, *psi.add(1)),
            Complex64::new(*psi.add(2), *psi.add(3)),
        ];
        let error = ErrorModel {
            epsilon,
            delta,
            gamma1,
            gamma2,
        };
        let r = tri!(lindblad_evolve(
            &TwoLevel,
            s,
            &error,
            &Operator::outer(&state, &state),
            &EngineConfig::default()
        )
        .map_err(from_error));
        *out = r.trajectory.last().map_or(f64::NAN, |t| t.state_fidelity);
        GpStatus::Ok
    })
}
