//! Thermal averaging over initial coherent states: occupations, the
//! suppression exponents γ± and a seeded Monte-Carlo check.

mod gamma;
mod sampling;

pub use gamma::{differential_phase, extract_gamma, gamma_factors, gamma_resonant_terms, SuppressionFactors};
pub use sampling::{mean_occupation, sample_initial_states, thermal_signal, ThermalParams, ThermalReport};
