//! C ABI over the simulator. Every function returns an [`SaStatus`]; on
//! failure the message is kept per thread and read with
//! [`sa_last_error_message`]. Handles are created by `*_new` functions and
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use soc_accel::dynamics::{ForceSignal, Tabulated, TrapConfig};
use soc_accel::engine::{preset_cp, preset_up, PulseEngine, SpinorCoherentState};
use soc_accel::response::{f0, f_cp};
use soc_accel::sensitivity::{sensitivity, ApparatusParams, CeilingRate, SpeciesParams};
use soc_accel::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Infeasible = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaSequence {
    Up = 0,
    Cp = 1,
}

/// Opaque trap handle.
pub struct SaTrap {
    engine: PulseEngine,
}

/// Opaque drive handle.
pub struct SaForce {
    signal: ForceSignal,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SaModes {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega_tilde: f64,
    pub omega_c: f64,
    pub l_osc: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SaMeasurement {
    pub signal: f64,
    pub coherence: f64,
    pub bloch_x: f64,
    pub bloch_y: f64,
    pub bloch_z: f64,
    pub branches: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SaSensitivity {
    pub v_mean: f64,
    pub r_t: f64,
    pub r_0: f64,
    pub n_layers: u64,
    pub gamma_coll: f64,
    pub n_c: f64,
    pub tau: f64,
    pub g_max: f64,
    pub s: f64,
    pub bandwidth: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut buf = e.borrow_mut();
        buf.clear();
        buf.extend(msg.bytes().filter(|&b| b != 0));
    });
}

fn status_of(err: &Error) -> SaStatus {
    match err {
        Error::InfeasibleGeometry { .. } => SaStatus::Infeasible,
        Error::Parameter(_) | Error::Sequence(_) | Error::Coverage { .. } => SaStatus::InvalidParameter,
        _ => SaStatus::Numerical,
    }
}

fn guard<F>(f: F) -> SaStatus
where
    F: FnOnce() -> Result<(), (SaStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SaStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SaStatus::Panic
        }
    }
}

fn lift<T>(r: soc_accel::Result<T>) -> Result<T, (SaStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SaStatus, String) {
    (SaStatus::NullPointer, format!("{what} is null"))
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// including the terminator, so a call with `len = 0` sizes the buffer.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sa_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), (SaStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn trap_handle(config: soc_accel::Result<TrapConfig>, out: *mut *mut SaTrap) -> SaStatus {
    guard(|| {
        let engine = lift(config.and_then(PulseEngine::new))?;
        store(out, SaTrap { engine })
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn sa_trap_new(mass: f64, omega0: f64, omega_c: f64, out: *mut *mut SaTrap) -> SaStatus {
    trap_handle(TrapConfig::new(mass, omega0, omega_c), out)
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn sa_trap_from_tilde_epsilon(
    mass: f64,
    omega_tilde: f64,
    epsilon: f64,
    out: *mut *mut SaTrap,
) -> SaStatus {
    trap_handle(TrapConfig::from_tilde_epsilon(mass, omega_tilde, epsilon), out)
}

/// # Safety
/// `trap` must be null or a handle from `sa_trap_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sa_trap_free(trap: *mut SaTrap) {
    if !trap.is_null() {
        drop(Box::from_raw(trap));
    }
}

/// # Safety
/// `trap` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sa_trap_modes(trap: *const SaTrap, out: *mut SaModes) -> SaStatus {
    guard(|| {
        let t = trap.as_ref().ok_or_else(|| null("trap"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        let m = t.engine.modes;
        *o = SaModes {
            omega_plus: m.omega_plus,
            omega_minus: m.omega_minus,
            omega_tilde: m.omega_tilde,
            omega_c: m.omega_c(),
            l_osc: m.l_osc,
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sa_force_zero(out: *mut *mut SaForce) -> SaStatus {
    guard(|| store(out, SaForce { signal: ForceSignal::Zero }))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sa_force_constant(gx: f64, gy: f64, out: *mut *mut SaForce) -> SaStatus {
    guard(|| {
        if !(gx.is_finite() && gy.is_finite()) {
            return Err((SaStatus::InvalidParameter, "constant drive must be finite".into()));
        }
        store(out, SaForce { signal: ForceSignal::Constant { g: [gx, gy] } })
    })
}

/// `g(t) = (ax, ay)·cos(omega·t + phase)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sa_force_sinusoid(ax: f64, ay: f64, omega: f64, phase: f64, out: *mut *mut SaForce) -> SaStatus {
    guard(|| {
        if ![ax, ay, omega, phase].iter().all(|v| v.is_finite()) {
            return Err((SaStatus::InvalidParameter, "sinusoid parameters must be finite".into()));
        }
        store(out, SaForce { signal: ForceSignal::sinusoid([ax, ay], omega, phase) })
    })
}

/// Uniformly sampled drive, linearly interpolated.
///
/// # Safety
/// `gx` and `gy` must be valid for `n` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sa_force_tabulated(
    t0: f64,
    dt: f64,
    gx: *const f64,
    gy: *const f64,
    n: usize,
    out: *mut *mut SaForce,
) -> SaStatus {
    guard(|| {
        if gx.is_null() || gy.is_null() {
            return Err(null("samples"));
        }
        let xs = std::slice::from_raw_parts(gx, n);
        let ys = std::slice::from_raw_parts(gy, n);
        let samples = xs.iter().zip(ys).map(|(x, y)| [*x, *y]).collect();
        let tab = lift(Tabulated::new(t0, dt, samples))?;
        store(out, SaForce { signal: ForceSignal::Tabulated(tab) })
    })
}

/// # Safety
/// `force` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_force_free(force: *mut SaForce) {
    if !force.is_null() {
        drop(Box::from_raw(force));
    }
}

unsafe fn fill_response(
    trap: *const SaTrap,
    r0: f64,
    t: f64,
    omega: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
    cp: bool,
) -> SaStatus {
    guard(|| {
        let tr = trap.as_ref().ok_or_else(|| null("trap"))?;
        if omega.is_null() || re.is_null() || im.is_null() {
            return Err(null("buffer"));
        }
        if !(t > 0.0) {
            return Err((SaStatus::InvalidParameter, format!("interrogation time must be > 0, got {t}")));
        }
        let w = std::slice::from_raw_parts(omega, n);
        let re = std::slice::from_raw_parts_mut(re, n);
        let im = std::slice::from_raw_parts_mut(im, n);
        for k in 0..n {
            let v = if cp { f_cp(&tr.engine.modes, r0, t, w[k]) } else { f0(&tr.engine.modes, r0, t, w[k]) };
            re[k] = v.re;
            im[k] = v.im;
        }
        Ok(())
    })
}

/// Ramsey response at `n` frequencies into `re`/`im`.
///
/// # Safety
/// `trap` must be live; `omega`, `re`, `im` valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn sa_response_up(
    trap: *const SaTrap,
    r0: f64,
    t: f64,
    omega: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> SaStatus {
    fill_response(trap, r0, t, omega, n, re, im, false)
}

/// Echo response at `n` frequencies into `re`/`im`.
///
/// # Safety
/// As for [`sa_response_up`].
#[no_mangle]
pub unsafe extern "C" fn sa_response_cp(
    trap: *const SaTrap,
    r0: f64,
    t: f64,
    omega: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> SaStatus {
    fill_response(trap, r0, t, omega, n, re, im, true)
}

/// Runs a preset sequence from the spin-up ground state. `drive` may be
/// null for no drive.
///
/// # Safety
/// `trap` must be live, `drive` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sa_run_preset(
    trap: *const SaTrap,
    kind: SaSequence,
    r0x: f64,
    r0y: f64,
    t: f64,
    drive: *const SaForce,
    out: *mut SaMeasurement,
) -> SaStatus {
    guard(|| {
        let tr = trap.as_ref().ok_or_else(|| null("trap"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        let zero = ForceSignal::Zero;
        let signal = drive.as_ref().map_or(&zero, |d| &d.signal);
        let seq = match kind {
            SaSequence::Up => preset_up([r0x, r0y], t),
            SaSequence::Cp => preset_cp([r0x, r0y], t),
        };
        let rec = lift(tr.engine.run_sequence(&SpinorCoherentState::ground(soc_accel::dynamics::Spin::Up), &seq, signal))?;
        *o = SaMeasurement {
            signal: rec.signal,
            coherence: rec.coherence,
            bloch_x: rec.bloch[0],
            bloch_y: rec.bloch[1],
            bloch_z: rec.bloch[2],
            branches: rec.final_state.branches.len(),
        };
        Ok(())
    })
}

/// Sensitivity budget for Rb-87 with the given apparatus.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sa_sensitivity_rb87(
    temperature: f64,
    layer_spacing: f64,
    homogeneity_radius: f64,
    omega_tilde: f64,
    epsilon: f64,
    atoms_per_layer: f64,
    out: *mut SaSensitivity,
) -> SaStatus {
    guard(|| {
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        let app = ApparatusParams { temperature, layer_spacing, homogeneity_radius, omega_tilde, epsilon, atoms_per_layer };
        let r = lift(sensitivity(&SpeciesParams::rb87(), &app, CeilingRate::default()))?;
        *o = SaSensitivity {
            v_mean: r.v_mean,
            r_t: r.r_t,
            r_0: r.r_0,
            n_layers: r.n_layers,
            gamma_coll: r.gamma_coll,
            n_c: r.n_c,
            tau: r.tau,
            g_max: r.g_max,
            s: r.s,
            bandwidth: r.bandwidth.fwhm,
        };
        Ok(())
    })
}
