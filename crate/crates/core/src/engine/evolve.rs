use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{Branch, SpinorCoherentState};
use crate::dynamics::trajectory::circle_amplitudes;
use crate::dynamics::{to_complex, ForceSignal, NormalModes, PhaseSpacePoint, Spin, TrapConfig};
use crate::error::{Error, Result};
use crate::quadrature::{exp_integral, gauss_legendre_nodes};
use crate::units::HBAR;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    /// Full driven-oscillator solution.
    #[default]
    Exact,
    /// Undriven orbits; the drive only contributes its first-order phase.
    FirstOrder,
}

/// Normal-mode amplitudes `(α+, α−)` of a trap-relative classical state.
/// Free evolution multiplies each by `e^{−iω±t}` for either spin, and
/// `ħω+|α+|² + ħω−|α−|²` is the classical energy.
pub fn mode_decompose(config: &TrapConfig, spin: Spin, point: PhaseSpacePoint) -> Result<(Complex64, Complex64)> {
    let modes = config.modes()?;
    let zeta = to_complex(point.position());
    let zeta_dot = to_complex(point.momentum()) / modes.mass;
    let (c_minus, c_plus) = circle_amplitudes(&modes, spin, zeta, zeta_dot);
    let l = modes.l_osc;
    Ok(match spin {
        Spin::Up => (c_plus / l, c_minus.conj() / l),
        Spin::Down => (c_plus.conj() / l, c_minus / l),
    })
}

/// Applies the primitives that need the trap parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEngine {
    pub config: TrapConfig,
    pub modes: NormalModes,
}

impl PulseEngine {
    pub fn new(config: TrapConfig) -> Result<Self> {
        Ok(PulseEngine { config, modes: config.modes()? })
    }

    /// Lab-frame mode frequencies `[ν_ccw, ν_cw]` seen by a spin.
    fn mode_frequencies(&self, spin: Spin) -> [f64; 2] {
        let half = 0.5 * spin.sign() * self.modes.omega_c();
        [self.modes.omega_tilde - half, self.modes.omega_tilde + half]
    }

    /// Lab position `⟨x + iy⟩` of a branch.
    pub fn lab_position(&self, lab: &[Complex64; 2]) -> Complex64 {
        self.modes.l_osc * (lab[0].conj() + lab[1])
    }

    /// Kinetic momentum `⟨m(vx + ivy)⟩` of a branch.
    pub fn kinetic_momentum(&self, spin: Spin, lab: &[Complex64; 2]) -> Complex64 {
        let l = self.modes.l_osc;
        let canonical = -I * (HBAR / l) * (lab[1] - lab[0].conj());
        canonical - I * spin.sign() * 0.5 * self.modes.mass * self.modes.omega_c() * self.lab_position(lab)
    }

    /// Classical state of a branch relative to the trap minimum.
    pub fn branch_point(&self, branch: &Branch, trap_origin: [f64; 2]) -> PhaseSpacePoint {
        let z = self.lab_position(&branch.lab) - to_complex(trap_origin);
        PhaseSpacePoint::from_complex(z, self.kinetic_momentum(branch.spin, &branch.lab))
    }

    /// Lab amplitudes of the coherent state centred on a trap-relative point.
    pub fn lab_amplitudes(&self, spin: Spin, point: PhaseSpacePoint, trap_origin: [f64; 2]) -> [Complex64; 2] {
        let l = self.modes.l_osc;
        let zeta = to_complex(point.position()) + to_complex(trap_origin);
        let p = to_complex(point.momentum()) + I * spin.sign() * 0.5 * self.modes.mass * self.modes.omega_c() * zeta;
        let b2 = 0.5 * (zeta / l + I * l * p / HBAR);
        let b1 = (0.5 * (zeta / l - I * l * p / HBAR)).conj();
        [b1, b2]
    }

    /// `(α+, α−)` of a branch in the current trap.
    pub fn mode_amplitudes(&self, branch: &Branch, trap_origin: [f64; 2]) -> Result<(Complex64, Complex64)> {
        mode_decompose(&self.config, branch.spin, self.branch_point(branch, trap_origin))
    }

    /// Evolves every branch for `duration` starting at the state clock.
    pub fn evolve(
        &self,
        state: &SpinorCoherentState,
        duration: f64,
        drive: &ForceSignal,
        mode: EvolutionMode,
    ) -> Result<SpinorCoherentState> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::Parameter(format!("evolution duration must be finite and ≥ 0, got {duration}")));
        }
        let t0 = state.time;
        let t1 = t0 + duration;
        drive.check_coverage(t0, t1)?;
        let mut out = SpinorCoherentState { branches: Vec::new(), trap_origin: state.trap_origin, time: t1 };
        if duration == 0.0 {
            out.branches = state.branches.clone();
            return Ok(out);
        }
        let rc = to_complex(state.trap_origin);
        let mut knots = vec![t0];
        knots.extend(drive.breakpoints(t0, t1));
        knots.push(t1);
        for branch in &state.branches {
            let next = self.evolve_branch(branch, rc, &knots, drive, mode);
            if !next.is_finite() {
                return Err(Error::Divergence { t: t1 });
            }
            out.push_merged(next);
        }
        Ok(out)
    }

    fn evolve_branch(&self, branch: &Branch, rc: Complex64, knots: &[f64], drive: &ForceSignal, mode: EvolutionMode) -> Branch {
        let m = self.modes.mass;
        let w0sq = self.modes.omega0().powi(2);
        let kappa = self.modes.l_osc / (2.0 * HBAR);
        let nu = self.mode_frequencies(branch.spin);
        let driven = mode == EvolutionMode::Exact && !drive.is_zero();
        let step = |b: [Complex64; 2], a: f64, c: f64| -> [Complex64; 2] {
            let d = c - a;
            if d <= 0.0 {
                return b;
            }
            let g = if driven { drive.mode_integral(nu[0], a, c) } else { [Complex64::new(0.0, 0.0); 2] };
            let g2 = if driven { drive.mode_integral(nu[1], a, c) } else { [Complex64::new(0.0, 0.0); 2] };
            let j1 = kappa * (-m * w0sq * rc.conj() * exp_integral(nu[0], d) - m * (g[0] - I * g[1]));
            let j2 = kappa * (-m * w0sq * rc * exp_integral(nu[1], d) - m * (g2[0] + I * g2[1]));
            [
                Complex64::from_polar(1.0, -nu[0] * d) * (b[0] - I * j1),
                Complex64::from_polar(1.0, -nu[1] * d) * (b[1] - I * j2),
            ]
        };
        let w_max = nu[1].max(nu[0]) + drive.max_frequency();
        let (t_start, t_end) = (knots[0], knots[knots.len() - 1]);
        let mut b = branch.lab;
        let mut t_prev = t_start;
        let mut action = 0.0;
        let first_order_factor = if mode == EvolutionMode::FirstOrder { 1.0 } else { 0.5 };
        for seg in knots.windows(2) {
            let panels = ((seg[1] - seg[0]) * w_max / 2.0).ceil().max(1.0) as usize;
            for (s, w) in gauss_legendre_nodes(seg[0], seg[1], panels) {
                b = step(b, t_prev, s);
                t_prev = s;
                let zeta = self.lab_position(&b);
                let g = to_complex(drive.eval_unchecked(s));
                let trap_term = 0.5 * (w0sq * rc).conj() * zeta;
                let drive_term = first_order_factor * g.conj() * zeta;
                action += w * (trap_term + drive_term).re;
            }
        }
        b = step(b, t_prev, t_end);
        let duration = t_end - t_start;
        let e0 = self.modes.omega_tilde + 0.5 * m * w0sq * rc.norm_sqr() / HBAR;
        Branch { lab: b, phase: branch.phase + (m / HBAR) * action - e0 * duration, ..*branch }
    }
}
