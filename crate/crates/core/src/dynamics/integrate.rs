use crate::error::{Error, Result};

use super::config::{NormalModes, Spin, TrapConfig};
use super::force::ForceSignal;
use super::trajectory::PhaseSpacePoint;

/// Sampled classical path (one sample per integrator step, plus t = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhaseSpacePoint>,
}

impl Trajectory {
    pub fn last(&self) -> PhaseSpacePoint {
        *self.points.last().expect("trajectory always holds the initial point")
    }
}

/// Fixed-step RK4 for the spin-σ equations of motion
///
/// ẍ = −ω0² x + σ ω_c ẏ + g_x,  ÿ = −ω0² y − σ ω_c ẋ + g_y
///
/// in the trap frame. Internally time is scaled by ω̃ and lengths by the
/// oscillator length. The final step is shortened to land on `t_final`.
pub fn integrate_eom_numeric(
    config: &TrapConfig,
    spin: Spin,
    initial: PhaseSpacePoint,
    force: &ForceSignal,
    dt: f64,
    t_final: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Parameter(format!("t_final must be non-negative, got {t_final}")));
    }
    force.check_coverage(0.0, t_final)?;
    let modes = config.modes()?;
    let NormalModes { omega_tilde: wt, l_osc: l, mass, .. } = modes;
    let k0 = (config.omega0 / wt).powi(2);
    let kc = spin.sign() * config.omega_c / wt;
    let accel_scale = 1.0 / (l * wt * wt);

    // y = [x, y, vx, vy] in scaled units
    let rhs = |tau: f64, y: &[f64; 4]| -> [f64; 4] {
        let g = force.eval_unchecked(tau / wt);
        [
            y[2],
            y[3],
            -k0 * y[0] + kc * y[3] + g[0] * accel_scale,
            -k0 * y[1] - kc * y[2] + g[1] * accel_scale,
        ]
    };

    let to_point = |y: &[f64; 4]| PhaseSpacePoint {
        x: y[0] * l,
        y: y[1] * l,
        px: y[2] * l * wt * mass,
        py: y[3] * l * wt * mass,
    };
    let mut y = [
        initial.x / l,
        initial.y / l,
        initial.px / (mass * l * wt),
        initial.py / (mass * l * wt),
    ];
    let steps = (t_final / dt).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(initial);
    let h_full = dt * wt;
    let tau_final = t_final * wt;
    let mut tau = 0.0;
    // compensated (Kahan) update keeps roundoff flat over millions of steps
    let mut carry = [0.0; 4];
    for k in 0..steps {
        let h = if k + 1 == steps { tau_final - tau } else { h_full };
        let k1 = rhs(tau, &y);
        let k2 = rhs(tau + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = rhs(tau + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = rhs(tau + h, &add(&y, &k3, h));
        for i in 0..4 {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - carry[i];
            let sum = y[i] + inc;
            carry[i] = (sum - y[i]) - inc;
            y[i] = sum;
        }
        tau = if k + 1 == steps { tau_final } else { (k + 1) as f64 * h_full };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t: tau / wt });
        }
        times.push(tau / wt);
        points.push(to_point(&y));
    }
    Ok(Trajectory { times, points })
}

fn add(y: &[f64; 4], k: &[f64; 4], h: f64) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

/// RK4 refined by step halving, starting from T_shortest/1000, until the
/// end point moves by less than `tol` (relative to the path's scale).
/// Returns the finest trajectory and the step it used.
pub fn integrate_eom_converged(
    config: &TrapConfig,
    spin: Spin,
    initial: PhaseSpacePoint,
    force: &ForceSignal,
    t_final: f64,
    tol: f64,
) -> Result<(Trajectory, f64)> {
    let modes = config.modes()?;
    let mut dt = modes.shortest_period() / 1000.0;
    let mut prev = integrate_eom_numeric(config, spin, initial, force, dt, t_final)?;
    for _ in 0..8 {
        dt *= 0.5;
        let next = integrate_eom_numeric(config, spin, initial, force, dt, t_final)?;
        let scale = path_scale(&next, &modes);
        let (a, b) = (prev.last(), next.last());
        let dev = (a.x - b.x).hypot(a.y - b.y)
            + (a.px - b.px).hypot(a.py - b.py) / (modes.mass * modes.omega_tilde);
        prev = next;
        // RK4 error drops 16× per halving; the finer run lies well inside `dev`
        if dev < tol * scale {
            return Ok((prev, dt));
        }
    }
    Ok((prev, dt))
}

fn path_scale(traj: &Trajectory, modes: &NormalModes) -> f64 {
    traj.points
        .iter()
        .map(|p| p.x.hypot(p.y) + p.px.hypot(p.py) / (modes.mass * modes.omega_tilde))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}
