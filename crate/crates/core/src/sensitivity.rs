//! Shot-noise budget: thermal geometry, collision-limited lifetime, the
//! sensitivity estimate, the signal ceiling and the optimal trap frequency.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dynamics::{NormalModes, TrapConfig};
use crate::error::{Error, Result};
use crate::response::{main_lobe_fwhm, response_cp, uniform_grid};
use crate::thermal::mean_occupation;
use crate::units::{HBAR, K_B, MASS_RB87};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesParams {
    pub mass: f64,
    pub scattering_length: f64,
    /// Spontaneous-emission rate (1/s).
    pub gamma_se: f64,
}

impl SpeciesParams {
    pub fn rb87() -> Self {
        SpeciesParams { mass: MASS_RB87, scattering_length: 5.3e-9, gamma_se: 1.0 / 70e-3 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("scattering_length", self.scattering_length), ("gamma_se", self.gamma_se)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("species.{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApparatusParams {
    pub temperature: f64,
    pub layer_spacing: f64,
    pub homogeneity_radius: f64,
    pub omega_tilde: f64,
    pub epsilon: f64,
    pub atoms_per_layer: f64,
}

impl ApparatusParams {
    /// 1 μK, d = 1 μm, r_l = 25 μm, ε = 22, ω̃ at the large-N optimum.
    pub fn reference(species: &SpeciesParams, atoms_per_layer: f64) -> Self {
        let mut a = ApparatusParams {
            temperature: 1e-6,
            layer_spacing: 1e-6,
            homogeneity_radius: 25e-6,
            omega_tilde: 0.0,
            epsilon: 22.0,
            atoms_per_layer,
        };
        a.omega_tilde = 2.0 * mean_speed(species, a.temperature) / a.homogeneity_radius;
        a
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("temperature", self.temperature, true),
            ("layer_spacing", self.layer_spacing, false),
            ("homogeneity_radius", self.homogeneity_radius, false),
            ("omega_tilde", self.omega_tilde, false),
            ("atoms_per_layer", self.atoms_per_layer, true),
        ];
        for (name, v, zero_ok) in positive {
            let ok = if zero_ok { v >= 0.0 } else { v > 0.0 };
            if !ok || !v.is_finite() {
                return Err(Error::Parameter(format!("apparatus.{name} has invalid value {v}")));
            }
        }
        if !(self.epsilon >= 1.0) {
            return Err(Error::Parameter(format!("apparatus.epsilon must be ≥ 1, got {}", self.epsilon)));
        }
        Ok(())
    }

    fn with_omega(&self, omega_tilde: f64) -> Self {
        ApparatusParams { omega_tilde, ..*self }
    }
}

fn mean_speed(species: &SpeciesParams, temperature: f64) -> f64 {
    (3.0 * K_B * temperature / species.mass).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    pub v_mean: f64,
    pub r_t: f64,
    pub r_0: f64,
    pub n_layers: u64,
}

pub fn thermal_geometry(species: &SpeciesParams, apparatus: &ApparatusParams) -> Result<Geometry> {
    species.validate()?;
    apparatus.validate()?;
    let v_mean = mean_speed(species, apparatus.temperature);
    let r_t = v_mean / apparatus.omega_tilde;
    let r_l = apparatus.homogeneity_radius;
    if r_t >= r_l {
        return Err(Error::InfeasibleGeometry { r_t, r_l });
    }
    Ok(Geometry { v_mean, r_t, r_0: r_l - r_t, n_layers: (r_l / apparatus.layer_spacing).floor() as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionBudget {
    pub gamma_coll: f64,
    /// Atoms per layer at which collisions equal spontaneous emission.
    pub n_c: f64,
    pub tau: f64,
}

pub fn collision_budget(species: &SpeciesParams, apparatus: &ApparatusParams, geometry: &Geometry) -> CollisionBudget {
    let a2 = species.scattering_length.powi(2);
    let d = apparatus.layer_spacing;
    let r_t2 = geometry.r_t.powi(2);
    let gamma_coll = apparatus.atoms_per_layer * geometry.v_mean * a2 / (d * r_t2);
    let n_c = species.gamma_se * d * r_t2 / (geometry.v_mean * a2);
    CollisionBudget { gamma_coll, n_c, tau: 1.0 / (species.gamma_se + gamma_coll) }
}

/// Which rate stands for γ_d in the signal ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeilingRate {
    /// `1/t` for the shortest echo interval `t = π/ω̃`.
    #[default]
    Interrogation,
    /// The measurement decay rate `1/τ`.
    Lifetime,
}

impl CeilingRate {
    pub fn rate(self, modes: &NormalModes, tau: f64) -> f64 {
        match self {
            CeilingRate::Interrogation => modes.omega_tilde / PI,
            CeilingRate::Lifetime => 1.0 / tau,
        }
    }
}

/// `g_max = (2γ_d/√⟨n⟩)(2πħ/(m r0))` with ⟨n⟩ the occupation at ω̃.
pub fn signal_ceiling(modes: &NormalModes, temperature: f64, r_0: f64, gamma_d: f64) -> Result<f64> {
    if !(r_0 > 0.0) {
        return Err(Error::Parameter(format!("release offset must be > 0, got {r_0}")));
    }
    let n = mean_occupation(modes.omega_tilde, temperature)?;
    if n == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * gamma_d / n.sqrt() * (2.0 * PI * HBAR / (modes.mass * r_0)))
}

/// Shot-noise estimate `√(1/(Nτ))·2πħ/(m r0)` for `N` atoms in total.
fn shot_noise(mass: f64, total_atoms: f64, tau: f64, r_0: f64) -> f64 {
    (1.0 / (total_atoms * tau)).sqrt() * 2.0 * PI * HBAR / (mass * r_0)
}

/// Echo interval used for the bandwidth: the largest turning time whose
/// four-interval sequence fits in one lifetime (at least `π/ω̃`).
pub fn bandwidth_interval(omega_tilde: f64, tau: f64) -> f64 {
    let n = (tau * omega_tilde / (4.0 * PI)).floor().max(1.0);
    n * PI / omega_tilde
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bandwidth {
    /// FWHM of the tallest |F_CP|² lobe (rad/s).
    pub fwhm: f64,
    /// `(1/8)(2π/t)`.
    pub estimate: f64,
    pub interval: f64,
}

pub fn echo_bandwidth(modes: &NormalModes, t: f64) -> Result<Bandwidth> {
    let hi = 3.0 * modes.omega_plus;
    let points = ((hi * t * 40.0 / (2.0 * PI)).ceil() as usize).max(4096);
    let curve = response_cp(modes, 1.0, t, &uniform_grid(0.0, hi, points))?;
    let fwhm = main_lobe_fwhm(&curve).ok_or_else(|| Error::Parameter("echo main lobe is not resolved".into()))?;
    Ok(Bandwidth { fwhm, estimate: 2.0 * PI / t / 8.0, interval: t })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapOptimum {
    pub omega_opt: f64,
    pub s_min: f64,
    pub bandwidth: Bandwidth,
    /// The minimum sits on an edge of the search range.
    pub at_boundary: bool,
}

impl TrapOptimum {
    /// The optimum, or a bracketing error if it lies on the range edge.
    pub fn interior(self, range: (f64, f64)) -> Result<Self> {
        if self.at_boundary {
            Err(Error::Bracketing { lo: range.0, hi: range.1 })
        } else {
            Ok(self)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub v_mean: f64,
    pub r_t: f64,
    pub r_0: f64,
    pub n_layers: u64,
    pub gamma_coll: f64,
    pub n_c: f64,
    pub tau: f64,
    pub g_max: f64,
    /// (m/s²)/√Hz.
    pub s: f64,
    pub bandwidth: Bandwidth,
}

fn modes_for(species: &SpeciesParams, apparatus: &ApparatusParams) -> Result<NormalModes> {
    TrapConfig::from_tilde_epsilon(species.mass, apparatus.omega_tilde, apparatus.epsilon)?.modes()
}

fn s_at(species: &SpeciesParams, apparatus: &ApparatusParams) -> Result<f64> {
    let g = thermal_geometry(species, apparatus)?;
    let b = collision_budget(species, apparatus, &g);
    Ok(shot_noise(species.mass, apparatus.atoms_per_layer * g.n_layers as f64, b.tau, g.r_0))
}

pub fn sensitivity(species: &SpeciesParams, apparatus: &ApparatusParams, ceiling: CeilingRate) -> Result<SensitivityReport> {
    let g = thermal_geometry(species, apparatus)?;
    let b = collision_budget(species, apparatus, &g);
    let modes = modes_for(species, apparatus)?;
    let s = shot_noise(species.mass, apparatus.atoms_per_layer * g.n_layers as f64, b.tau, g.r_0);
    let g_max = signal_ceiling(&modes, apparatus.temperature, g.r_0, ceiling.rate(&modes, b.tau))?;
    let bandwidth = echo_bandwidth(&modes, bandwidth_interval(apparatus.omega_tilde, b.tau))?;
    Ok(SensitivityReport {
        v_mean: g.v_mean,
        r_t: g.r_t,
        r_0: g.r_0,
        n_layers: g.n_layers,
        gamma_coll: b.gamma_coll,
        n_c: b.n_c,
        tau: b.tau,
        g_max,
        s,
        bandwidth,
    })
}

/// Default search range: from just above the feasibility edge `v/r_l` to
/// a hundred times it.
pub fn default_search_range(species: &SpeciesParams, apparatus: &ApparatusParams) -> (f64, f64) {
    let edge = mean_speed(species, apparatus.temperature) / apparatus.homogeneity_radius;
    (1.01 * edge, 100.0 * edge)
}

/// Golden-section minimisation of S over ω̃ (in log ω̃). A minimum at an
/// edge of `range` is returned with `at_boundary` set.
pub fn optimize_trap(species: &SpeciesParams, apparatus: &ApparatusParams, range: (f64, f64)) -> Result<TrapOptimum> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Bracketing { lo, hi });
    }
    let s = |ln_w: f64| s_at(species, &apparatus.with_omega(ln_w.exp()));
    if s(lo.ln()).is_err() {
        return Err(Error::Bracketing { lo, hi });
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (s(c)?, s(d)?);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = s(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = s(d)?;
        }
    }
    let ln_opt = 0.5 * (a + b);
    let edge_tol = 1e-6;
    let at_boundary = ln_opt - lo.ln() < edge_tol || hi.ln() - ln_opt < edge_tol;
    let omega_opt = ln_opt.exp();
    let at = apparatus.with_omega(omega_opt);
    let g = thermal_geometry(species, &at)?;
    let budget = collision_budget(species, &at, &g);
    let modes = modes_for(species, &at)?;
    let bandwidth = echo_bandwidth(&modes, bandwidth_interval(omega_opt, budget.tau))?;
    Ok(TrapOptimum { omega_opt, s_min: s(ln_opt)?, bandwidth, at_boundary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub atoms_per_layer: f64,
    pub n_over_nc: f64,
    pub omega_opt: f64,
    pub s: f64,
    pub bandwidth: f64,
    pub at_boundary: bool,
}

/// S and bandwidth at the optimal trap frequency for each atom number.
/// `N/N_c` uses N_c at the optimum.
pub fn atom_number_sweep(species: &SpeciesParams, apparatus: &ApparatusParams, atoms: &[f64]) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    atoms
        .par_iter()
        .map(|&n| {
            let app = ApparatusParams { atoms_per_layer: n, ..*apparatus };
            let opt = optimize_trap(species, &app, default_search_range(species, &app))?;
            let at = app.with_omega(opt.omega_opt);
            let g = thermal_geometry(species, &at)?;
            let b = collision_budget(species, &at, &g);
            Ok(SweepRow {
                atoms_per_layer: n,
                n_over_nc: n / b.n_c,
                omega_opt: opt.omega_opt,
                s: opt.s_min,
                bandwidth: opt.bandwidth.fwhm,
                at_boundary: opt.at_boundary,
            })
        })
        .collect()
}
