use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{NormalModes, Spin};

/// Amplitudes closer than this (per mode) are treated as the same ket.
pub(crate) const MERGE_TOL: f64 = 1e-12;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One term `weight · e^{i·phase} |spin⟩|b⟩` of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub spin: Spin,
    pub weight: Complex64,
    /// Accumulated dynamical and drive phase, rad.
    pub phase: f64,
    /// Lab-basis coherent amplitudes: `[counter-clockwise, clockwise]`
    /// circular quanta of the reference oscillator.
    pub lab: [Complex64; 2],
}

impl Branch {
    pub fn coefficient(&self) -> Complex64 {
        self.weight * Complex64::from_polar(1.0, self.phase)
    }

    pub fn is_finite(&self) -> bool {
        self.weight.is_finite() && self.phase.is_finite() && self.lab.iter().all(|a| a.is_finite())
    }
}

/// `⟨a|b⟩` for two-mode coherent states.
pub fn coherent_overlap(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    let mut expo = Complex64::new(0.0, 0.0);
    for k in 0..2 {
        expo += -0.5 * a[k].norm_sqr() - 0.5 * b[k].norm_sqr() + a[k].conj() * b[k];
    }
    expo.exp()
}

/// Closed-form branch overlap `|⟨φ₊|φ₋⟩|` of the undriven Ramsey sequence
/// after free evolution for `t`, released at rest from offset `r0`:
/// `exp(−(r0/l)²(h⊥² + k²))` with `k = (ω+ cos ω−t − ω− cos ω+t − ω_c)/(2ω̃)`.
/// The `k` term is the canonical-momentum mismatch the synthetic field
/// builds up between the two spins while they move.
pub fn ramsey_overlap_closed_form(modes: &NormalModes, r0: f64, t: f64) -> f64 {
    let h = crate::dynamics::h_perp(modes, t);
    let k = (modes.omega_plus * (modes.omega_minus * t).cos()
        - modes.omega_minus * (modes.omega_plus * t).cos()
        - modes.omega_c())
        / (2.0 * modes.omega_tilde);
    (-(r0 / modes.l_osc).powi(2) * (h * h + k * k)).exp()
}

/// Spinor state built from coherent branches, plus the current trap-minimum
/// position (lab frame, m) and the sequence clock (s).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorCoherentState {
    pub branches: Vec<Branch>,
    pub trap_origin: [f64; 2],
    pub time: f64,
}

impl SpinorCoherentState {
    /// Orbital ground state with the given spin, trap minimum at the origin.
    pub fn ground(spin: Spin) -> Self {
        Self::from_lab_amplitudes(spin, [Complex64::new(0.0, 0.0); 2])
    }

    pub fn from_lab_amplitudes(spin: Spin, lab: [Complex64; 2]) -> Self {
        SpinorCoherentState {
            branches: vec![Branch { spin, weight: Complex64::new(1.0, 0.0), phase: 0.0, lab }],
            trap_origin: [0.0, 0.0],
            time: 0.0,
        }
    }

    /// Spin-up coherent state with normal-mode amplitudes `(α+, α−)` of the
    /// undisplaced spin-up Hamiltonian (the P-representation coordinates).
    pub fn spin_up_thermal(alpha_plus: Complex64, alpha_minus: Complex64) -> Self {
        // for σ = +1 the counter-clockwise quantum is the ω− mode
        Self::from_lab_amplitudes(Spin::Up, [alpha_minus, alpha_plus])
    }

    /// `M[s][s'] = Σ_{i∈s, j∈s'} c̄ᵢ cⱼ ⟨bᵢ|bⱼ⟩` with index 0 = up.
    fn spin_matrix(&self) -> [[Complex64; 2]; 2] {
        let idx = |s: Spin| usize::from(s == Spin::Down);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for bi in &self.branches {
            let ci = bi.coefficient().conj();
            for bj in &self.branches {
                m[idx(bi.spin)][idx(bj.spin)] += ci * bj.coefficient() * coherent_overlap(&bi.lab, &bj.lab);
            }
        }
        m
    }

    pub fn norm(&self) -> f64 {
        let m = self.spin_matrix();
        m[0][0].re + m[1][1].re
    }

    /// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` normalised by the state norm.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let m = self.spin_matrix();
        let n = m[0][0].re + m[1][1].re;
        [2.0 * m[0][1].re / n, 2.0 * m[0][1].im / n, (m[0][0].re - m[1][1].re) / n]
    }

    pub fn expectation_spin(&self, axis: Axis) -> f64 {
        let b = self.bloch_vector();
        match axis {
            Axis::X => b[0],
            Axis::Y => b[1],
            Axis::Z => b[2],
        }
    }

    /// Length of the Bloch vector: 1 for a pure spin state, reduced by
    /// incomplete orbital overlap of the branches.
    pub fn coherence(&self) -> f64 {
        let b = self.bloch_vector();
        (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()
    }

    /// `e^{−iσ_y·angle/2}` on the spin of every branch, merging coincident kets.
    pub fn rotated(&self, angle: f64) -> Self {
        if angle == 0.0 {
            return self.clone();
        }
        let (c, s) = ((0.5 * angle).cos(), (0.5 * angle).sin());
        let mut out = SpinorCoherentState { branches: Vec::new(), trap_origin: self.trap_origin, time: self.time };
        for b in &self.branches {
            let (keep, flip) = match b.spin {
                Spin::Up => (c, s),
                Spin::Down => (c, -s),
            };
            out.push_merged(Branch { weight: b.weight * keep, ..*b });
            out.push_merged(Branch { spin: b.spin.flipped(), weight: b.weight * flip, ..*b });
        }
        out.branches.retain(|b| b.weight.norm() > DROP_TOL);
        out
    }

    /// Moves the trap minimum by `shift`. The atomic state itself is not
    /// touched; only the frame the dynamics refer to changes.
    pub fn displaced(&self, shift: [f64; 2]) -> Self {
        let mut out = self.clone();
        out.trap_origin = [self.trap_origin[0] + shift[0], self.trap_origin[1] + shift[1]];
        out
    }

    pub(crate) fn push_merged(&mut self, branch: Branch) {
        if branch.weight.norm() <= DROP_TOL {
            return;
        }
        let same = self.branches.iter_mut().find(|b| {
            b.spin == branch.spin && (0..2).all(|k| (b.lab[k] - branch.lab[k]).norm() <= MERGE_TOL)
        });
        match same {
            Some(existing) => {
                existing.weight += branch.weight * Complex64::from_polar(1.0, branch.phase - existing.phase);
            }
            None => self.branches.push(branch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn two_branch() -> SpinorCoherentState {
        SpinorCoherentState {
            branches: vec![
                Branch {
                    spin: Spin::Up,
                    weight: Complex64::new(0.6, 0.0),
                    phase: 0.3,
                    lab: [Complex64::new(0.2, -0.1), Complex64::new(0.0, 0.5)],
                },
                Branch {
                    spin: Spin::Down,
                    weight: Complex64::new(0.0, 0.8),
                    phase: -1.1,
                    lab: [Complex64::new(-0.4, 0.0), Complex64::new(0.3, 0.3)],
                },
            ],
            trap_origin: [0.0, 0.0],
            time: 0.0,
        }
    }

    #[test]
    fn pure_up_is_z_polarised() {
        let s = SpinorCoherentState::ground(Spin::Up);
        assert_eq!(s.expectation_spin(Axis::Z), 1.0);
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let s = two_branch();
        assert_eq!(s.rotated(0.0), s);
    }

    #[test]
    fn pi_rotation_flips_spin() {
        let s = SpinorCoherentState::ground(Spin::Up).rotated(PI);
        assert_eq!(s.branches.len(), 1);
        assert_eq!(s.branches[0].spin, Spin::Down);
        assert_relative_eq!(s.branches[0].weight.norm(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn inverse_rotation_restores_branch_count() {
        let s = SpinorCoherentState::ground(Spin::Up);
        let back = s.rotated(PI / 2.0).rotated(-PI / 2.0);
        assert_eq!(back.branches.len(), 1);
        assert_relative_eq!(back.expectation_spin(Axis::Z), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn rotations_compose_and_preserve_norm() {
        let s = two_branch();
        let n0 = s.norm();
        let a = s.rotated(0.4).rotated(1.1);
        let b = s.rotated(1.5);
        assert_relative_eq!(a.norm(), n0, max_relative = 1e-12);
        let (va, vb) = (a.bloch_vector(), b.bloch_vector());
        for k in 0..3 {
            assert!((va[k] - vb[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn displacement_moves_only_the_trap() {
        let s = two_branch();
        let d = s.displaced([1e-6, 2e-6]).displaced([-1e-6, -2e-6]);
        assert_eq!(d.branches, s.branches);
        assert!(d.trap_origin[0].abs() < 1e-21);
    }

    #[test]
    fn overlap_of_identical_states_is_one() {
        let a = [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.4)];
        assert_relative_eq!(coherent_overlap(&a, &a).re, 1.0, max_relative = 1e-15);
        let b = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let expect = (-0.5 * (a[0].norm_sqr() + a[1].norm_sqr())).exp();
        assert_relative_eq!(coherent_overlap(&a, &b).norm(), expect, max_relative = 1e-15);
    }
}
