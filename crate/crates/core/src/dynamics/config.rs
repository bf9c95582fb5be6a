use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::HBAR;

/// Pseudo-spin label. `Up` carries charge +1 under the synthetic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn from_sign(sigma: i32) -> Result<Spin> {
        match sigma {
            1 => Ok(Spin::Up),
            -1 => Ok(Spin::Down),
            other => Err(Error::Parameter(format!("spin label must be ±1, got {other}"))),
        }
    }
}

/// Physical parameters of the trapped, synthetically charged particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Particle mass, kg.
    pub mass: f64,
    /// Bare trap frequency ω₀, rad/s.
    pub omega0: f64,
    /// Cyclotron frequency ω_c of the synthetic field, rad/s.
    pub omega_c: f64,
}

impl TrapConfig {
    pub fn new(mass: f64, omega0: f64, omega_c: f64) -> Result<Self> {
        let cfg = TrapConfig { mass, omega0, omega_c };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build from the mean mode frequency ω̃ and the mode ratio ε = ω+/ω−.
    pub fn from_tilde_epsilon(mass: f64, omega_tilde: f64, epsilon: f64) -> Result<Self> {
        if !(omega_tilde > 0.0 && omega_tilde.is_finite()) {
            return Err(Error::Parameter(format!("omega_tilde must be positive, got {omega_tilde}")));
        }
        if !(epsilon >= 1.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon = ω+/ω− must be ≥ 1, got {epsilon}")));
        }
        let omega_minus = 2.0 * omega_tilde / (1.0 + epsilon);
        let omega_plus = epsilon * omega_minus;
        Self::new(mass, (omega_plus * omega_minus).sqrt(), omega_plus - omega_minus)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::Parameter(format!("mass must be positive, got {}", self.mass)));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Parameter(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if !(self.omega_c >= 0.0 && self.omega_c.is_finite()) {
            return Err(Error::Parameter(format!("omega_c must be non-negative, got {}", self.omega_c)));
        }
        Ok(())
    }

    pub fn modes(&self) -> Result<NormalModes> {
        derive_modes(self)
    }
}

/// Normal-mode structure of the trap: two circular modes at ω± = ω̃ ± ω_c/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega_tilde: f64,
    /// Oscillator length √(ħ/mω̃), m.
    pub l_osc: f64,
    pub mass: f64,
}

impl NormalModes {
    pub fn omega_c(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }

    pub fn omega0(&self) -> f64 {
        (self.omega_plus * self.omega_minus).sqrt()
    }

    pub fn epsilon(&self) -> f64 {
        self.omega_plus / self.omega_minus
    }

    /// Period of the fastest mode, 2π/ω+.
    pub fn shortest_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_plus
    }

    /// The n-th zero-velocity time πn/ω̃.
    pub fn turning_time(&self, n: u32) -> f64 {
        std::f64::consts::PI * n as f64 / self.omega_tilde
    }
}

pub fn derive_modes(config: &TrapConfig) -> Result<NormalModes> {
    config.validate()?;
    let half_c = 0.5 * config.omega_c;
    let omega_tilde = config.omega0.hypot(half_c);
    let omega_plus = omega_tilde + half_c;
    // ω+ω− = ω0² holds exactly this way; ω̃ − ωc/2 cancels badly for ωc ≫ ω0
    let omega_minus = config.omega0 * (config.omega0 / omega_plus);
    Ok(NormalModes {
        omega_plus,
        omega_minus,
        omega_tilde,
        l_osc: (HBAR / (config.mass * omega_tilde)).sqrt(),
        mass: config.mass,
    })
}
