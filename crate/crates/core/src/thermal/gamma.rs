use num_complex::Complex64;
use serde::Serialize;

use super::sampling::ThermalParams;
use crate::dynamics::{ForceSignal, NormalModes};
use crate::engine::{PulseEngine, PulsePrimitive, PulseSequence, SpinorCoherentState};
use crate::error::{Error, Result};
use crate::response::SequenceKind;
use crate::units::HBAR;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppressionFactors {
    pub gamma_plus: Complex64,
    pub gamma_minus: Complex64,
    /// `exp(−n+|γ+|² − n−|γ−|²)`.
    pub suppression: f64,
}

impl SuppressionFactors {
    pub fn new(gamma_plus: Complex64, gamma_minus: Complex64, params: &ThermalParams) -> Self {
        let suppression = (-params.n_plus * gamma_plus.norm_sqr() - params.n_minus * gamma_minus.norm_sqr()).exp();
        SuppressionFactors { gamma_plus, gamma_minus, suppression }
    }
}

/// `∫₀ᵗ e^{iνs}(g_x ± i g_y) ds` for the two signs.
fn circular_integrals(drive: &ForceSignal, nu: f64, t: f64) -> (Complex64, Complex64) {
    let [ix, iy] = drive.mode_integral(nu, 0.0, t);
    (ix + I * iy, ix - I * iy)
}

/// γ± of the Ramsey sequence. At a full revival the differential phase
/// depends on the initial mode amplitudes as `2 Re(γ̄+α+ + γ̄−α−)` with
/// `γ+ = −(m l/2ħ)∫(g_x+ig_y)(e^{iω+s} − e^{iω−s})ds` and
/// `γ− = −(m l/2ħ)∫(g_x−ig_y)(e^{iω−s} − e^{iω+s})ds`.
/// For the echo sequence the functional is extracted from the engine.
pub fn gamma_factors(
    engine: &PulseEngine,
    kind: SequenceKind,
    r0: [f64; 2],
    drive: &ForceSignal,
    t: f64,
    params: &ThermalParams,
) -> Result<SuppressionFactors> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("interrogation time must be > 0, got {t}")));
    }
    match kind {
        SequenceKind::Up => {
            drive.check_coverage(0.0, t)?;
            let m = &engine.modes;
            let k = m.mass * m.l_osc / (2.0 * HBAR);
            let (pp, pm) = circular_integrals(drive, m.omega_plus, t);
            let (mp, mm) = circular_integrals(drive, m.omega_minus, t);
            let gp = -k * (pp - mp);
            let gm = -k * (mm - pm);
            Ok(SuppressionFactors::new(gp, gm, params))
        }
        SequenceKind::Cp => {
            let (gp, gm) = extract_gamma(engine, &crate::engine::preset_cp(r0, t), drive)?;
            Ok(SuppressionFactors::new(gp, gm, params))
        }
    }
}

/// The resonant integrals alone:
/// `γ+ = (m l/2ħ)∫(g_x + i g_y)e^{iω+s}ds`, `γ− = (m l/2ħ)∫(g_y + i g_x)e^{iω−s}ds`.
pub fn gamma_resonant_terms(modes: &NormalModes, drive: &ForceSignal, t: f64) -> (Complex64, Complex64) {
    let k = modes.mass * modes.l_osc / (2.0 * HBAR);
    let [px, py] = drive.mode_integral(modes.omega_plus, 0.0, t);
    let [mx, my] = drive.mode_integral(modes.omega_minus, 0.0, t);
    (k * (px + I * py), k * (my + I * mx))
}

/// Phase of the spin coherence just before the final recombination pulse,
/// `arg(⟨σx⟩ + i⟨σy⟩)`.
pub fn differential_phase(
    engine: &PulseEngine,
    sequence: &PulseSequence,
    initial: &SpinorCoherentState,
    drive: &ForceSignal,
) -> Result<f64> {
    let cut = sequence
        .primitives
        .iter()
        .rposition(|p| matches!(p, PulsePrimitive::RotateY { .. }))
        .unwrap_or(sequence.primitives.len());
    let open = PulseSequence { name: sequence.name.clone(), primitives: sequence.primitives[..cut].to_vec() };
    let rec = engine.run_sequence(initial, &open, drive)?;
    Ok(rec.bloch[1].atan2(rec.bloch[0]))
}

fn wrap(phase: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    phase - tau * (phase / tau).round()
}

/// `(γ+, γ−)` as half the gradient of the differential phase with respect to
/// the initial spin-up mode amplitudes, from unit probes along 1 and i.
pub fn extract_gamma(engine: &PulseEngine, sequence: &PulseSequence, drive: &ForceSignal) -> Result<(Complex64, Complex64)> {
    let phase = |ap: Complex64, am: Complex64| {
        differential_phase(engine, sequence, &SpinorCoherentState::spin_up_thermal(ap, am), drive)
    };
    let zero = Complex64::new(0.0, 0.0);
    let base = phase(zero, zero)?;
    let grad = |probe: &dyn Fn(Complex64) -> Result<f64>| -> Result<Complex64> {
        let re = wrap(probe(Complex64::new(1.0, 0.0))? - base);
        let im = wrap(probe(I)? - base);
        Ok(0.5 * Complex64::new(re, im))
    };
    let gp = grad(&|a| phase(a, zero))?;
    let gm = grad(&|a| phase(zero, a))?;
    Ok((gp, gm))
}
