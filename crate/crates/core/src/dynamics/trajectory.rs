use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{NormalModes, Spin};
use super::to_complex;

/// Classical state relative to the trap minimum. Momenta are kinetic
/// (`m·v`), so the point does not depend on the gauge.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhaseSpacePoint {
    pub fn at_rest(r: [f64; 2]) -> Self {
        PhaseSpacePoint { x: r[0], y: r[1], px: 0.0, py: 0.0 }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn momentum(&self) -> [f64; 2] {
        [self.px, self.py]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.px.is_finite() && self.py.is_finite()
    }

    pub(crate) fn from_complex(zeta: Complex64, momentum: Complex64) -> Self {
        PhaseSpacePoint { x: zeta.re, y: zeta.im, px: momentum.re, py: momentum.im }
    }
}

/// Circle amplitudes (c−, c+) of the free orbit ζ(t) = c− e^{iσω−t} + c+ e^{−iσω+t}.
pub(crate) fn circle_amplitudes(modes: &NormalModes, spin: Spin, zeta: Complex64, zeta_dot: Complex64) -> (Complex64, Complex64) {
    let s = spin.sign();
    let two_wt = 2.0 * modes.omega_tilde;
    let i_s = Complex64::new(0.0, s);
    let c_minus = (zeta * modes.omega_plus - i_s * zeta_dot) / two_wt;
    let c_plus = (zeta * modes.omega_minus + i_s * zeta_dot) / two_wt;
    (c_minus, c_plus)
}

/// Undriven evolution of an arbitrary classical state for time `t`.
pub fn propagate_free(modes: &NormalModes, spin: Spin, point: PhaseSpacePoint, t: f64) -> PhaseSpacePoint {
    let s = spin.sign();
    let zeta = to_complex(point.position());
    let zeta_dot = to_complex(point.momentum()) / modes.mass;
    let (c_minus, c_plus) = circle_amplitudes(modes, spin, zeta, zeta_dot);
    let rot_m = Complex64::from_polar(1.0, s * modes.omega_minus * t);
    let rot_p = Complex64::from_polar(1.0, -s * modes.omega_plus * t);
    let z = c_minus * rot_m + c_plus * rot_p;
    let v = Complex64::new(0.0, s) * (c_minus * rot_m * modes.omega_minus - c_plus * rot_p * modes.omega_plus);
    PhaseSpacePoint::from_complex(z, v * modes.mass)
}

/// Undriven orbit released at rest from `r0` (relative to the trap minimum).
pub fn classical_trajectory(modes: &NormalModes, spin: Spin, r0: [f64; 2], t: f64) -> PhaseSpacePoint {
    propagate_free(modes, spin, PhaseSpacePoint::at_rest(r0), t)
}

/// The differential-phase kernel h⊥(t) = (ω− sin ω+t − ω+ sin ω−t)/(2ω̃).
///
/// For an orbit released at rest from `r0`, the two spin paths are split
/// perpendicular to `r0` by `2·|r0|·h⊥(t)`.
pub fn h_perp(modes: &NormalModes, t: f64) -> f64 {
    (modes.omega_minus * (modes.omega_plus * t).sin() - modes.omega_plus * (modes.omega_minus * t).sin())
        / (2.0 * modes.omega_tilde)
}
