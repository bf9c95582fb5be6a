use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::gamma::{extract_gamma, SuppressionFactors};
use crate::dynamics::{ForceSignal, NormalModes};
use crate::engine::{PulseEngine, PulseSequence, SpinorCoherentState};
use crate::error::{Error, Result};
use crate::units::{HBAR, K_B};

/// Bose–Einstein occupation `1/(e^{ħω/kT} − 1)`; 0 at T = 0.
pub fn mean_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Parameter(format!("mode frequency must be > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Parameter(format!("temperature must be ≥ 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalParams {
    /// `None` when the occupations were set directly.
    pub temperature: Option<f64>,
    pub n_plus: f64,
    pub n_minus: f64,
}

impl ThermalParams {
    pub fn from_temperature(modes: &NormalModes, temperature: f64) -> Result<Self> {
        Ok(ThermalParams {
            temperature: Some(temperature),
            n_plus: mean_occupation(modes.omega_plus, temperature)?,
            n_minus: mean_occupation(modes.omega_minus, temperature)?,
        })
    }

    pub fn from_occupations(n_plus: f64, n_minus: f64) -> Result<Self> {
        if !(n_plus >= 0.0 && n_minus >= 0.0 && n_plus.is_finite() && n_minus.is_finite()) {
            return Err(Error::Parameter(format!("occupations must be finite and ≥ 0, got ({n_plus}, {n_minus})")));
        }
        Ok(ThermalParams { temperature: None, n_plus, n_minus })
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn circular_gaussian(rng: &mut ChaCha20Rng, mean_sq: f64) -> Complex64 {
    let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
    (0.5 * mean_sq).sqrt() * Complex64::new(a, b)
}

/// Sample `index` of the P-representation stream; each sample has its own
/// ChaCha stream so any subset can be drawn independently.
fn sample_one(params: &ThermalParams, seed: u64, index: u64) -> (Complex64, Complex64) {
    let mut rng = sample_rng(seed, index);
    let ap = circular_gaussian(&mut rng, params.n_plus);
    let am = circular_gaussian(&mut rng, params.n_minus);
    (ap, am)
}

/// `(α+, α−)` draws with `⟨|α±|²⟩ = n±`.
pub fn sample_initial_states(params: &ThermalParams, count: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    (0..count as u64).map(|i| sample_one(params, seed, i)).collect()
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalReport {
    pub seed: u64,
    pub count: usize,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    /// Zero-temperature signal times the suppression factor.
    pub analytic: f64,
    pub zero_temperature: f64,
    pub factors: SuppressionFactors,
    pub params: ThermalParams,
}

/// Ensemble-averaged signal of `sequence` from a thermal spin-up state,
/// alongside the γ-based prediction. Bit-identical for a fixed seed
/// regardless of the number of worker threads.
pub fn thermal_signal(
    engine: &PulseEngine,
    sequence: &PulseSequence,
    drive: &ForceSignal,
    params: &ThermalParams,
    count: usize,
    seed: u64,
) -> Result<ThermalReport> {
    if count < 100 {
        return Err(Error::Parameter(format!("need at least 100 samples, got {count}")));
    }
    let signals: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let (ap, am) = sample_one(params, seed, i);
            Ok(engine.run_sequence(&SpinorCoherentState::spin_up_thermal(ap, am), sequence, drive)?.signal)
        })
        .collect::<Result<_>>()?;
    let n = count as f64;
    let mean = pairwise_sum(&signals) / n;
    let dev: Vec<f64> = signals.iter().map(|s| (s - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    let zero = SpinorCoherentState::spin_up_thermal(0.0.into(), 0.0.into());
    let zero_temperature = engine.run_sequence(&zero, sequence, drive)?.signal;
    let (gp, gm) = extract_gamma(engine, sequence, drive)?;
    let factors = SuppressionFactors::new(gp, gm, params);
    Ok(ThermalReport {
        seed,
        count,
        mc_mean: mean,
        mc_stderr: (var / n).sqrt(),
        analytic: zero_temperature * factors.suppression,
        zero_temperature,
        factors,
        params: *params,
    })
}
