use serde::{Deserialize, Serialize};

use super::evolve::{EvolutionMode, PulseEngine};
use super::state::{Axis, SpinorCoherentState};
use crate::dynamics::{ForceSignal, NormalModes};
use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulsePrimitive {
    RotateY { angle: f64 },
    /// Moves the trap minimum by `shift` (m).
    Displace { shift: [f64; 2] },
    Evolve {
        duration: f64,
        #[serde(default)]
        mode: EvolutionMode,
    },
    Readout {
        #[serde(default = "default_axis")]
        axis: Axis,
    },
}

fn default_axis() -> Axis {
    Axis::Y
}

impl PulsePrimitive {
    fn label(&self) -> String {
        match self {
            PulsePrimitive::RotateY { angle } => format!("rotate_y({angle:.6})"),
            PulsePrimitive::Displace { shift } => format!("displace({:e}, {:e})", shift[0], shift[1]),
            PulsePrimitive::Evolve { duration, .. } => format!("evolve({duration:e})"),
            PulsePrimitive::Readout { axis } => format!("readout({axis:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequence {
    pub name: String,
    pub primitives: Vec<PulsePrimitive>,
}

impl PulseSequence {
    pub fn validate(&self) -> Result<()> {
        let last = self.primitives.len().saturating_sub(1);
        for (k, p) in self.primitives.iter().enumerate() {
            match p {
                PulsePrimitive::Readout { .. } if k != last => {
                    return Err(Error::Sequence(format!("readout at step {k} is not terminal")));
                }
                PulsePrimitive::Evolve { duration, .. } if !(*duration >= 0.0 && duration.is_finite()) => {
                    return Err(Error::Sequence(format!("step {k}: evolve duration {duration} must be ≥ 0")));
                }
                PulsePrimitive::RotateY { angle } if !angle.is_finite() => {
                    return Err(Error::Sequence(format!("step {k}: rotation angle is not finite")));
                }
                PulsePrimitive::Displace { shift } if !shift.iter().all(|s| s.is_finite()) => {
                    return Err(Error::Sequence(format!("step {k}: displacement is not finite")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Sum of the evolution durations.
    pub fn interrogation_time(&self) -> f64 {
        self.primitives
            .iter()
            .map(|p| match p {
                PulsePrimitive::Evolve { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    /// Same sequence with every free evolution switched to `mode`.
    pub fn with_mode(&self, mode: EvolutionMode) -> PulseSequence {
        let primitives = self
            .primitives
            .iter()
            .map(|p| match p {
                PulsePrimitive::Evolve { duration, .. } => PulsePrimitive::Evolve { duration: *duration, mode },
                other => other.clone(),
            })
            .collect();
        PulseSequence { name: self.name.clone(), primitives }
    }
}

/// Ramsey sequence: split, release from offset `r0`, wait `t`, recombine.
///
/// The atom is released at `r0` relative to the trap minimum, so the trap
/// itself moves by `−r0`.
pub fn preset_up(r0: [f64; 2], t: f64) -> PulseSequence {
    PulseSequence {
        name: "up".into(),
        primitives: vec![
            PulsePrimitive::RotateY { angle: PI / 2.0 },
            PulsePrimitive::Displace { shift: [-r0[0], -r0[1]] },
            PulsePrimitive::Evolve { duration: t, mode: EvolutionMode::Exact },
            PulsePrimitive::RotateY { angle: -PI / 2.0 },
            PulsePrimitive::Readout { axis: Axis::Y },
        ],
    }
}

/// Echo sequence with π pulses after `t` and `3t`; total evolution `4t`.
pub fn preset_cp(r0: [f64; 2], t: f64) -> PulseSequence {
    let evolve = |d: f64| PulsePrimitive::Evolve { duration: d, mode: EvolutionMode::Exact };
    PulseSequence {
        name: "cp".into(),
        primitives: vec![
            PulsePrimitive::RotateY { angle: PI / 2.0 },
            PulsePrimitive::Displace { shift: [-r0[0], -r0[1]] },
            evolve(t),
            PulsePrimitive::RotateY { angle: PI },
            evolve(2.0 * t),
            PulsePrimitive::RotateY { angle: PI },
            evolve(t),
            PulsePrimitive::RotateY { angle: -PI / 2.0 },
            PulsePrimitive::Readout { axis: Axis::Y },
        ],
    }
}

/// Warning text when `t` is not a turning time `πn/ω̃`, so a π pulse there
/// does not reverse the motion.
pub fn turning_time_mismatch(modes: &NormalModes, t: f64) -> Option<String> {
    let n = (t * modes.omega_tilde / PI).round();
    let nearest = n * PI / modes.omega_tilde;
    if n >= 1.0 && (t - nearest).abs() <= 1e-9 * t {
        None
    } else {
        let n = n.max(1.0);
        Some(format!(
            "t = {t:e} s is not a turning time; nearest is {:e} s (n = {n})",
            n * PI / modes.omega_tilde
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub label: String,
    pub time: f64,
    pub branches: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub axis: Axis,
    /// Spin expectation along the readout axis.
    pub signal: f64,
    /// Bloch-vector length at readout.
    pub coherence: f64,
    pub bloch: [f64; 3],
    pub trace: Vec<TraceEntry>,
    #[serde(skip)]
    pub final_state: SpinorCoherentState,
}

impl PulseEngine {
    /// Applies the primitives in order. Without an explicit readout the
    /// state is read along y.
    pub fn run_sequence(
        &self,
        initial: &SpinorCoherentState,
        sequence: &PulseSequence,
        drive: &ForceSignal,
    ) -> Result<MeasurementRecord> {
        sequence.validate()?;
        let mut state = initial.clone();
        let mut axis = Axis::Y;
        let mut trace = Vec::with_capacity(sequence.primitives.len());
        for p in &sequence.primitives {
            state = match p {
                PulsePrimitive::RotateY { angle } => state.rotated(*angle),
                PulsePrimitive::Displace { shift } => state.displaced(*shift),
                PulsePrimitive::Evolve { duration, mode } => self.evolve(&state, *duration, drive, *mode)?,
                PulsePrimitive::Readout { axis: a } => {
                    axis = *a;
                    state
                }
            };
            trace.push(TraceEntry { label: p.label(), time: state.time, branches: state.branches.len(), norm: state.norm() });
        }
        let bloch = state.bloch_vector();
        let signal = state.expectation_spin(axis);
        let coherence = state.coherence();
        Ok(MeasurementRecord { axis, signal, coherence, bloch, trace, final_state: state })
    }
}
