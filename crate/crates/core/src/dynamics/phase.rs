use crate::error::{Error, Result};
use crate::quadrature::simpson;
use crate::units::HBAR;

use super::config::TrapConfig;
use super::force::ForceSignal;

/// First-order drive phase `(m/ħ) ∫₀^{t_final} r(t)·g(t) dt` along `path`,
/// by composite Simpson with the given step (trapezoid on a leftover
/// partial interval). `path` returns the position at time t.
pub fn phase_first_order<P>(config: &TrapConfig, path: P, force: &ForceSignal, t_final: f64, step: f64) -> Result<f64>
where
    P: Fn(f64) -> [f64; 2],
{
    if !(t_final >= 0.0) {
        return Err(Error::Parameter(format!("t_final must be non-negative, got {t_final}")));
    }
    if !(step > 0.0) {
        return Err(Error::Parameter(format!("quadrature step must be positive, got {step}")));
    }
    force.check_coverage(0.0, t_final)?;
    if force.is_zero() {
        return Ok(0.0);
    }
    let integral = simpson(0.0, t_final, step, |t| {
        let r = path(t);
        let g = force.eval_unchecked(t);
        r[0] * g[0] + r[1] * g[1]
    });
    Ok(config.mass / HBAR * integral)
}
