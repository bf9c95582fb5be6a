//! Single-particle dynamics of the spin-orbit-coupled trap: parameters,
//! normal modes, closed-form orbits, the drive model and an independent
//! Runge–Kutta oracle.

mod config;
mod force;
mod integrate;
mod phase;
pub(crate) mod trajectory;

pub use config::{derive_modes, NormalModes, Spin, TrapConfig};
pub use force::{ForceSignal, SpectralLine, Tabulated};
pub use integrate::{integrate_eom_converged, integrate_eom_numeric, Trajectory};
pub use phase::phase_first_order;
pub use trajectory::{classical_trajectory, h_perp, propagate_free, PhaseSpacePoint};

/// Complex coordinate ζ = x + iy for a planar vector.
pub(crate) fn to_complex(v: [f64; 2]) -> num_complex::Complex64 {
    num_complex::Complex64::new(v[0], v[1])
}
