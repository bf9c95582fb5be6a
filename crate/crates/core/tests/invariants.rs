use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use soc_accel::dynamics::{propagate_free, ForceSignal, PhaseSpacePoint, Spin, TrapConfig};
use soc_accel::engine::{mode_decompose, preset_cp, EvolutionMode, PulseEngine, SpinorCoherentState};
use soc_accel::response::{f0, f_cp};
use soc_accel::thermal::{sample_initial_states, ThermalParams};
use soc_accel::units::{HBAR, MASS_RB87};

fn engine(omega_tilde: f64, eps: f64) -> PulseEngine {
    PulseEngine::new(TrapConfig::from_tilde_epsilon(MASS_RB87, omega_tilde, eps).unwrap()).unwrap()
}

fn spin(up: bool) -> Spin {
    if up {
        Spin::Up
    } else {
        Spin::Down
    }
}

prop_compose! {
    fn trap()(w in 500.0..2e4f64, eps in 1.0..30.0f64) -> PulseEngine {
        engine(w, eps)
    }
}

prop_compose! {
    fn point()(x in -3.0..3.0f64, y in -3.0..3.0f64, vx in -3.0..3.0f64, vy in -3.0..3.0f64) -> [f64; 4] {
        [x, y, vx, vy]
    }
}

fn scaled(e: &PulseEngine, p: [f64; 4]) -> PhaseSpacePoint {
    let l = e.modes.l_osc;
    let q = e.modes.mass * e.modes.omega_tilde * l;
    PhaseSpacePoint { x: p[0] * l, y: p[1] * l, px: p[2] * q, py: p[3] * q }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_centre_follows_classical_orbit(e in trap(), p in point(), up: bool, tau in 0.0..40.0f64) {
        let s = spin(up);
        let t = tau / e.modes.omega_tilde;
        let start = scaled(&e, p);
        let st = SpinorCoherentState::from_lab_amplitudes(s, e.lab_amplitudes(s, start, [0.0, 0.0]));
        let out = e.evolve(&st, t, &ForceSignal::Zero, EvolutionMode::Exact).unwrap();
        let q = e.branch_point(&out.branches[0], out.trap_origin);
        let c = propagate_free(&e.modes, s, start, t);
        let l = e.modes.l_osc;
        let pm = e.modes.mass * e.modes.omega_tilde * l;
        prop_assert!((q.x - c.x).hypot(q.y - c.y) < 1e-9 * l);
        prop_assert!((q.px - c.px).hypot(q.py - c.py) < 1e-9 * pm);
    }

    #[test]
    fn mode_energy_is_conserved(e in trap(), p in point(), up: bool, tau in 0.0..40.0f64) {
        let s = spin(up);
        let start = scaled(&e, p);
        let end = propagate_free(&e.modes, s, start, tau / e.modes.omega_tilde);
        let energy = |q| {
            let (ap, am): (Complex64, Complex64) = mode_decompose(&e.config, s, q).unwrap();
            HBAR * (e.modes.omega_plus * ap.norm_sqr() + e.modes.omega_minus * am.norm_sqr())
        };
        let classical = 0.5 * e.modes.mass * (e.modes.omega0().powi(2) * (start.x.powi(2) + start.y.powi(2)))
            + 0.5 * (start.px.powi(2) + start.py.powi(2)) / e.modes.mass;
        let e0 = energy(start);
        prop_assert!((e0 - classical).abs() <= 1e-9 * classical.max(1e-40));
        prop_assert!((energy(end) - e0).abs() <= 1e-9 * e0.max(1e-40));
    }

    #[test]
    fn driven_evolution_preserves_norm(e in trap(), amp in 0.0..1.0f64, w in 0.0..3.0f64, tau in 0.0..30.0f64) {
        let st = SpinorCoherentState::ground(Spin::Up).rotated(PI / 2.0).displaced([2e-6, -1e-6]);
        let drive = ForceSignal::sinusoid([amp, -0.5 * amp], w * e.modes.omega_plus, 0.2);
        let out = e.evolve(&st, tau / e.modes.omega_tilde, &drive, EvolutionMode::Exact).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        prop_assert!(out.coherence() <= 1.0 + 1e-12);
    }

    #[test]
    fn rotations_compose(a in -2.0 * PI..2.0 * PI, b in -2.0 * PI..2.0 * PI) {
        let st = SpinorCoherentState::ground(Spin::Up);
        let two = st.rotated(a).rotated(b).bloch_vector();
        let one = st.rotated(a + b).bloch_vector();
        for k in 0..3 {
            prop_assert!((two[k] - one[k]).abs() < 1e-12);
        }
        prop_assert!((one[0] - (a + b).sin()).abs() < 1e-12);
        prop_assert!((one[2] - (a + b).cos()).abs() < 1e-12);
    }

    #[test]
    fn echo_response_vanishes_at_dc(e in trap(), r0 in 1e-7..1e-5f64, n in 1u32..8) {
        let t = e.modes.turning_time(n);
        prop_assert!(f_cp(&e.modes, r0, t, 0.0).norm() < 1e-12 * f0(&e.modes, r0, t, e.modes.omega_minus).norm().max(1e-300));
    }

    #[test]
    fn undriven_echo_is_silent(e in trap(), x in -5e-6..5e-6f64, y in -5e-6..5e-6f64, n in 1u32..6) {
        let rec = e
            .run_sequence(&SpinorCoherentState::ground(Spin::Up), &preset_cp([x, y], e.modes.turning_time(n)), &ForceSignal::Zero)
            .unwrap();
        prop_assert!(rec.signal.abs() < 1e-9);
        prop_assert!((rec.coherence - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_samples_are_reproducible(seed: u64, np in 0.0..20.0f64, nm in 0.0..20.0f64) {
        let params = ThermalParams::from_occupations(np, nm).unwrap();
        let a = sample_initial_states(&params, 32, seed);
        prop_assert_eq!(&a, &sample_initial_states(&params, 32, seed));
        prop_assert_eq!(&a[..16], &sample_initial_states(&params, 16, seed)[..]);
    }
}
