//! Exact interferometer state as a superposition of spin-labelled coherent
//! branches, and the pulse primitives acting on it.
//!
//! Each branch is stored by its coherent amplitudes in a fixed lab basis:
//! the isotropic oscillator of frequency ω̃ centred where the atom starts,
//! with the synthetic field in symmetric gauge about the same point. In that
//! gauge every spin Hamiltonian is `ħω̃(n₁+n₂+1) − σ(ω_c/2)L_z` plus terms
//! linear in the amplitudes, so coherent branches stay coherent under every
//! primitive and overlaps between branches are exact.

mod evolve;
mod sequence;
mod state;

pub use evolve::{mode_decompose, EvolutionMode, PulseEngine};
pub use sequence::{
    preset_cp, preset_up, turning_time_mismatch, MeasurementRecord, PulsePrimitive, PulseSequence, TraceEntry,
};
pub use state::{coherent_overlap, ramsey_overlap_closed_form, Axis, Branch, SpinorCoherentState};
