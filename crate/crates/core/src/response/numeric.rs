use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{ForceSignal, Spin};
use crate::engine::{PulseEngine, PulsePrimitive, PulseSequence, SpinorCoherentState};
use crate::error::{Error, Result};
use crate::units::HBAR;

/// Largest quadratic-to-linear ratio accepted by the probe.
const MAX_NONLINEARITY: f64 = 1e-2;
/// Largest linear signal accepted by the probe (rad).
const MAX_SIGNAL: f64 = 0.1;

/// Release offset `r0` implied by the sequence's trap displacements.
fn release_offset(sequence: &PulseSequence) -> [f64; 2] {
    let mut shift = [0.0, 0.0];
    for p in &sequence.primitives {
        if let PulsePrimitive::Displace { shift: s } = p {
            shift[0] += s[0];
            shift[1] += s[1];
        }
    }
    [-shift[0], -shift[1]]
}

/// Unit vector `ẑ × r̂0`.
pub fn probe_direction(sequence: &PulseSequence) -> Result<[f64; 2]> {
    let r0 = release_offset(sequence);
    let norm = r0[0].hypot(r0[1]);
    if norm == 0.0 {
        return Err(Error::Sequence("sequence has no net displacement, so no probe direction".into()));
    }
    Ok([-r0[1] / norm, r0[0] / norm])
}

/// Linear response of the sequence's signal to `a·cos(Ωt + φ)` applied along
/// `ẑ × r̂0`, fitted over the probe phases. With the returned `F`, the
/// signal is `a·Re(e^{−iφ}F)` to first order.
pub fn numeric_response(
    engine: &PulseEngine,
    sequence: &PulseSequence,
    omega: f64,
    amplitude: f64,
    phases: &[f64],
) -> Result<Complex64> {
    if phases.len() < 2 {
        return Err(Error::Parameter("numeric response needs at least two probe phases".into()));
    }
    if !(amplitude > 0.0) {
        return Err(Error::Parameter(format!("probe amplitude must be > 0, got {amplitude}")));
    }
    let dir = probe_direction(sequence)?;
    let start = SpinorCoherentState::ground(Spin::Up);
    let run = |a: f64, phi: f64| -> Result<f64> {
        let drive = ForceSignal::sinusoid([a * dir[0], a * dir[1]], omega, phi);
        Ok(engine.run_sequence(&start, sequence, &drive)?.signal)
    };
    let base = engine.run_sequence(&start, sequence, &ForceSignal::Zero)?.signal;
    // order of the largest linear signal the sequence can produce; keeps
    // the check meaningful at zeros of the response
    let r0 = release_offset(sequence);
    let r0 = r0[0].hypot(r0[1]);
    let reference = amplitude * (engine.modes.mass / HBAR) * r0 * sequence.interrogation_time() * 1e-2;
    // normal equations for L(φ) = a(cos φ·X + sin φ·Y)
    let (mut scc, mut scs, mut sss, mut slc, mut sls) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &phi in phases {
        let odd = |a: f64| -> Result<(f64, f64)> {
            let (plus, minus) = (run(a, phi)?, run(-a, phi)?);
            Ok((0.5 * (plus - minus), 0.5 * (plus + minus) - base))
        };
        let (full, quad) = odd(amplitude)?;
        let (half, _) = odd(0.5 * amplitude)?;
        if full.abs() > MAX_SIGNAL {
            return Err(Error::Parameter(format!("probe signal {full:.3e} rad exceeds {MAX_SIGNAL} rad")));
        }
        // the signal is odd in the drive at zero temperature, so the cubic
        // term is checked through the halving defect as well
        let scale = full.abs().max(reference);
        let ratio = (quad.abs() / scale).max((full - 2.0 * half).abs() / scale);
        if ratio > MAX_NONLINEARITY {
            return Err(Error::AmplitudeTooLarge { ratio });
        }
        // Richardson step removes the cubic term of the response
        let lin = (8.0 * half - full) / 3.0;
        let (c, s) = (phi.cos(), phi.sin());
        scc += c * c;
        scs += c * s;
        sss += s * s;
        slc += lin * c / amplitude;
        sls += lin * s / amplitude;
    }
    let det = scc * sss - scs * scs;
    if det.abs() < 1e-12 {
        return Err(Error::Parameter("probe phases must not be congruent modulo π".into()));
    }
    Ok(Complex64::new((slc * sss - sls * scs) / det, (sls * scc - slc * scs) / det))
}

/// [`numeric_response`] over a grid with phases 0 and π/2, evaluated in
/// parallel; the result does not depend on the worker count.
pub fn numeric_response_curve(
    engine: &PulseEngine,
    sequence: &PulseSequence,
    grid: &[f64],
    amplitude: f64,
) -> Result<Vec<Complex64>> {
    let phases = [0.0, std::f64::consts::FRAC_PI_2];
    grid.par_iter().map(|&w| numeric_response(engine, sequence, w, amplitude, &phases)).collect()
}
