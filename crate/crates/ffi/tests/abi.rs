use std::ffi::{CStr, CString};
use std::ptr;

use geophase_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gp_last_error()) }.to_str().unwrap().to_string()
}

fn named(gate: &str, scheme: &str) -> *mut GpSchedule {
    let mut s = ptr::null_mut();
    let status = unsafe { gp_schedule_named(cstr(gate).as_ptr(), cstr(scheme).as_ptr(), &mut s) };
    assert_eq!(status, GpStatus::Ok, "{}", last_error());
    s
}

#[test]
fn named_schedule_lifecycle() {
    let s = named("S", "dyncorrected");
    unsafe {
        assert_eq!(gp_schedule_segment_count(s), 9);
        assert!(gp_schedule_duration(s) > 0.0);
        let mut f = 0.0;
        assert_eq!(gp_gate_fidelity(s, 0.0, 0.0, &mut f), GpStatus::Ok);
        assert!(f > 1.0 - 1e-12);
        assert_eq!(gp_gate_fidelity(s, 0.1, 0.0, &mut f), GpStatus::Ok);
        assert!((f - 0.999825).abs() < 1e-5);
        assert!(last_error().is_empty());
        gp_schedule_free(s);
    }
}

#[test]
fn single_loop_closed_form_through_abi() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            gp_schedule_new(
                0.0,
                0.0,
                -std::f64::consts::FRAC_PI_4,
                cstr("singleloop").as_ptr(),
                &mut s
            ),
            GpStatus::Ok
        );
        let mut f = 0.0;
        assert_eq!(gp_gate_fidelity(s, 0.1, 0.0, &mut f), GpStatus::Ok);
        assert!((f - 0.9928323927588719).abs() < 1e-12);
        gp_schedule_free(s);
    }
}

#[test]
fn propagator_layout() {
    let s = named("H", "singleloop");
    let mut u = [0.0; 8];
    unsafe {
        assert_eq!(gp_propagator(s, 0.0, 0.0, u.as_mut_ptr()), GpStatus::Ok);
        gp_schedule_free(s);
    }
    // e^{-iπ/2 (σx+σz)/√2} = -i(σx+σz)/√2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expect = [0.0, -h, 0.0, -h, 0.0, -h, 0.0, h];
    // compare up to a global phase fixed by the first entry
    let phase = num_complex::Complex64::new(u[0], u[1]) / num_complex::Complex64::new(expect[0], expect[1]);
    for k in 0..4 {
        let got = num_complex::Complex64::new(u[2 * k], u[2 * k + 1]);
        let want = num_complex::Complex64::new(expect[2 * k], expect[2 * k + 1]) * phase;
        assert!((got - want).norm() < 1e-10, "{u:?}");
    }
}

#[test]
fn json_roundtrip() {
    let s = named("T", "composite(3)");
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(gp_schedule_to_json(s, &mut json), GpStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(gp_schedule_from_json(json, &mut back), GpStatus::Ok);
        assert_eq!(gp_schedule_segment_count(back), 9);
        gp_string_free(json);
        gp_schedule_free(back);
        gp_schedule_free(s);
    }
}

#[test]
fn lindblad_headline() {
    let s = named("S", "dyncorrected");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [h, 0.0, h, 0.0];
    let mut f = 0.0;
    unsafe {
        assert_eq!(
            gp_lindblad_state_fidelity(s, 0.0, 0.0, 1e-4, 1e-4, psi.as_ptr(), &mut f),
            GpStatus::Ok
        );
        assert!((f - 0.9986).abs() < 1e-3);
        let bad = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(
            gp_lindblad_state_fidelity(s, 0.0, 0.0, 1e-4, 1e-4, bad.as_ptr(), &mut f),
            GpStatus::InvalidArgument
        );
        gp_schedule_free(s);
    }
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            gp_schedule_named(cstr("X").as_ptr(), cstr("singleloop").as_ptr(), &mut s),
            GpStatus::InvalidArgument
        );
        assert!(last_error().contains("S, T, H, U2"));
        assert_eq!(
            gp_schedule_named(cstr("U2").as_ptr(), cstr("singleloop").as_ptr(), &mut s),
            GpStatus::InvalidArgument
        );
        assert_eq!(
            gp_schedule_new(0.0, 0.0, 0.0, cstr("spiral").as_ptr(), &mut s),
            GpStatus::InvalidArgument
        );
        assert_eq!(
            gp_schedule_new(4.0, 0.0, 0.0, cstr("singleloop").as_ptr(), &mut s),
            GpStatus::InvalidArgument
        );
        assert_eq!(
            gp_schedule_new(0.0, 0.0, 0.0, ptr::null(), &mut s),
            GpStatus::NullPointer
        );
        assert_eq!(
            gp_schedule_from_json(cstr("{").as_ptr(), &mut s),
            GpStatus::InvalidArgument
        );
        assert!(s.is_null());
        let mut f = 0.0;
        assert_eq!(gp_gate_fidelity(ptr::null(), 0.0, 0.0, &mut f), GpStatus::NullPointer);
        let ok = named("S", "singleloop");
        assert_eq!(gp_gate_fidelity(ok, 0.9, 0.0, &mut f), GpStatus::InvalidArgument);
        let bad_utf8 = [0xffu8, 0];
        assert_eq!(
            gp_schedule_named(bad_utf8.as_ptr().cast(), cstr("singleloop").as_ptr(), &mut s),
            GpStatus::InvalidUtf8
        );
        assert_eq!(gp_schedule_segment_count(ptr::null()), 0);
        gp_schedule_free(ok);
        gp_schedule_free(ptr::null_mut());
        gp_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/geophase.h");
    for name in [
        "gp_last_error",
        "gp_schedule_new",
        "gp_schedule_named",
        "gp_schedule_from_json",
        "gp_schedule_free",
        "gp_schedule_segment_count",
        "gp_schedule_duration",
        "gp_schedule_to_json",
        "gp_string_free",
        "gp_propagator",
        "gp_gate_fidelity",
        "gp_lindblad_state_fidelity",
        "GP_STATUS_INVALID_ARGUMENT",
        "typedef struct GpSchedule GpSchedule",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
