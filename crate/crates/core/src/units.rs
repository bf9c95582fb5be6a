//! Physical constants (SI, CODATA 2018 exact or recommended values).

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass of ⁸⁷Rb.
pub const MASS_RB87: f64 = 1.443_16e-25;
