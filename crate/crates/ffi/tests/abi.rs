use std::ffi::CStr;
use std::ptr;

use soc_accel_ffi::*;

const RB87: f64 = 1.443_160_6e-25;

fn last_error() -> String {
    unsafe {
        let n = sa_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0 as std::ffi::c_char; n];
        sa_last_error_message(buf.as_mut_ptr(), n);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn trap() -> *mut SaTrap {
    let mut t = ptr::null_mut();
    let st = unsafe { sa_trap_from_tilde_epsilon(RB87, 2.0 * std::f64::consts::PI * 1e3, 22.0, &mut t) };
    assert_eq!(st, SaStatus::Ok);
    t
}

#[test]
fn modes_through_handle() {
    let t = trap();
    let mut m = SaModes::default();
    assert_eq!(unsafe { sa_trap_modes(t, &mut m) }, SaStatus::Ok);
    assert!((m.omega_plus - m.omega_minus - m.omega_c).abs() < 1e-9 * m.omega_plus);
    assert!((m.omega_plus / m.omega_minus - 22.0).abs() < 1e-9);
    unsafe { sa_trap_free(t) };
}

#[test]
fn invalid_trap_reports_code_and_message() {
    let mut t = ptr::null_mut();
    let st = unsafe { sa_trap_new(-1.0, 1.0, 1.0, &mut t) };
    assert_eq!(st, SaStatus::InvalidParameter);
    assert!(t.is_null());
    assert!(last_error().contains("mass"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut m = SaModes::default();
    assert_eq!(unsafe { sa_trap_modes(ptr::null(), &mut m) }, SaStatus::NullPointer);
    assert_eq!(unsafe { sa_force_zero(ptr::null_mut()) }, SaStatus::NullPointer);
    unsafe {
        sa_trap_free(ptr::null_mut());
        sa_force_free(ptr::null_mut());
    }
}

#[test]
fn error_message_truncates() {
    let mut t = ptr::null_mut();
    unsafe { sa_trap_new(-1.0, 1.0, 1.0, &mut t) };
    let full = unsafe { sa_last_error_message(ptr::null_mut(), 0) };
    let mut buf = [0x55 as std::ffi::c_char; 4];
    let n = unsafe { sa_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, full);
    assert_eq!(buf[3], 0);
}

#[test]
fn response_buffers_match_core() {
    let t = trap();
    let omega: Vec<f64> = (1..64).map(|k| k as f64 * 300.0).collect();
    let mut re = vec![0.0; omega.len()];
    let mut im = vec![0.0; omega.len()];
    let st = unsafe { sa_response_up(t, 5e-6, 1e-3, omega.as_ptr(), omega.len(), re.as_mut_ptr(), im.as_mut_ptr()) };
    assert_eq!(st, SaStatus::Ok);
    let cfg = soc_accel::dynamics::TrapConfig::from_tilde_epsilon(RB87, 2.0 * std::f64::consts::PI * 1e3, 22.0).unwrap();
    let modes = soc_accel::engine::PulseEngine::new(cfg).unwrap().modes;
    for (k, w) in omega.iter().enumerate() {
        let v = soc_accel::response::f0(&modes, 5e-6, 1e-3, *w);
        assert_eq!((re[k], im[k]), (v.re, v.im));
    }
    let bad = unsafe { sa_response_cp(t, 5e-6, 0.0, omega.as_ptr(), omega.len(), re.as_mut_ptr(), im.as_mut_ptr()) };
    assert_eq!(bad, SaStatus::InvalidParameter);
    unsafe { sa_trap_free(t) };
}

#[test]
fn preset_signal_needs_drive() {
    // ε = 4 and t = 5π/ω̃ put both modes on a revival.
    let wt = 2.0 * std::f64::consts::PI * 1e3;
    let t_int = 5.0 * std::f64::consts::PI / wt;
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { sa_trap_from_tilde_epsilon(RB87, wt, 4.0, &mut t) }, SaStatus::Ok);
    let mut m = SaModes::default();
    unsafe { sa_trap_modes(t, &mut m) };
    let mut out = SaMeasurement::default();
    let st = unsafe { sa_run_preset(t, SaSequence::Up, 1e-7, 0.0, t_int, ptr::null(), &mut out) };
    assert_eq!(st, SaStatus::Ok);
    assert!(out.signal.abs() < 1e-9);
    assert!(out.coherence > 0.99);

    let mut f = ptr::null_mut();
    let st = unsafe { sa_force_sinusoid(0.0, 1e-4, m.omega_minus, std::f64::consts::FRAC_PI_2, &mut f) };
    assert_eq!(st, SaStatus::Ok);
    let st = unsafe { sa_run_preset(t, SaSequence::Up, 1e-7, 0.0, t_int, f, &mut out) };
    assert_eq!(st, SaStatus::Ok);
    assert!(out.signal.abs() > 1e-6, "{}", out.signal);
    unsafe {
        sa_force_free(f);
        sa_trap_free(t);
    }
}

#[test]
fn tabulated_drive_validates_samples() {
    let gx = [0.0, 1e-4, 0.0];
    let gy = [0.0; 3];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { sa_force_tabulated(0.0, 1e-4, gx.as_ptr(), gy.as_ptr(), 3, &mut f) }, SaStatus::Ok);
    unsafe { sa_force_free(f) };
    let mut g = ptr::null_mut();
    let st = unsafe { sa_force_tabulated(0.0, -1.0, gx.as_ptr(), gy.as_ptr(), 3, &mut g) };
    assert_eq!(st, SaStatus::InvalidParameter);
}

#[test]
fn sensitivity_reference_point() {
    let mut s = SaSensitivity::default();
    let v = 1.694e-2;
    let st = unsafe { sa_sensitivity_rb87(1e-6, 1e-6, 25e-6, 2.0 * v / 25e-6, 22.0, 1e8, &mut s) };
    assert_eq!(st, SaStatus::Ok);
    assert!(s.s > 0.0 && s.s.is_finite());
    let st = unsafe { sa_sensitivity_rb87(1e-3, 1e-6, 25e-6, 2.0 * v / 25e-6, 22.0, 1e8, &mut s) };
    assert_eq!(st, SaStatus::Infeasible);
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(sa_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/soc_accel.h")).unwrap();
    for sym in ["sa_trap_new", "sa_run_preset", "sa_last_error_message", "SA_STATUS_INFEASIBLE", "typedef struct SaTrap SaTrap"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let st = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/soc_accel.h"))
        .status()
        .unwrap();
    assert!(st.success());
}
