use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{ForceSignal, Tabulated, TrapConfig};
use crate::engine::{preset_cp, preset_up, PulsePrimitive, PulseSequence};
use crate::sensitivity::{ApparatusParams, CeilingRate, SpeciesParams};
use crate::thermal::ThermalParams;
use crate::units::MASS_RB87;

pub const SCHEMA_VERSION: u32 = 1;

/// Configuration problem, tagged with the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

fn key_err<E: std::fmt::Display>(key: &str) -> impl Fn(E) -> ConfigError + '_ {
    move |e| ConfigError(format!("{key}: {e}"))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSpec {
    pub mass: Option<f64>,
    pub omega_tilde: Option<f64>,
    pub epsilon: Option<f64>,
    pub omega0: Option<f64>,
    pub omega_c: Option<f64>,
}

impl TrapSpec {
    /// Either `(omega_tilde, epsilon)` or `(omega0, omega_c)`; defaults to
    /// Rb-87 at ω̃ = 2π·1 kHz, ε = 22.
    pub fn build(&self) -> Result<TrapConfig, ConfigError> {
        let mass = self.mass.unwrap_or(MASS_RB87);
        let direct = (self.omega0, self.omega_c);
        let tilde = (self.omega_tilde, self.epsilon);
        let cfg = match (direct, tilde) {
            ((Some(w0), Some(wc)), (None, None)) => TrapConfig::new(mass, w0, wc),
            ((None, None), (wt, eps)) => {
                TrapConfig::from_tilde_epsilon(mass, wt.unwrap_or(2.0 * std::f64::consts::PI * 1e3), eps.unwrap_or(22.0))
            }
            _ => {
                return Err(ConfigError(
                    "trap: give either omega0 and omega_c, or omega_tilde and epsilon".into(),
                ))
            }
        };
        cfg.map_err(key_err("trap"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesPreset {
    Rb87,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SpeciesSpec {
    Preset(SpeciesPreset),
    Explicit(SpeciesParams),
}

impl Default for SpeciesSpec {
    fn default() -> Self {
        SpeciesSpec::Preset(SpeciesPreset::Rb87)
    }
}

impl SpeciesSpec {
    pub fn build(&self) -> Result<SpeciesParams, ConfigError> {
        let s = match self {
            SpeciesSpec::Preset(SpeciesPreset::Rb87) => SpeciesParams::rb87(),
            SpeciesSpec::Explicit(p) => *p,
        };
        s.validate().map_err(key_err("species"))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSelect {
    #[default]
    Up,
    Cp,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default)]
    pub kind: SequenceSelect,
    /// Release offset from the trap minimum (m).
    #[serde(default = "default_r0")]
    pub r0: [f64; 2],
    /// First free-evolution interval (s). Defaults to `5π/ω̃`.
    pub t: Option<f64>,
    pub primitives: Option<Vec<PulsePrimitive>>,
}

fn default_r0() -> [f64; 2] {
    [5e-6, 0.0]
}

impl Default for SequenceSpec {
    fn default() -> Self {
        SequenceSpec { kind: SequenceSelect::Up, r0: default_r0(), t: None, primitives: None }
    }
}

impl SequenceSpec {
    pub fn interval(&self, omega_tilde: f64) -> Result<f64, ConfigError> {
        let t = self.t.unwrap_or(5.0 * std::f64::consts::PI / omega_tilde);
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError(format!("sequence.t must be > 0, got {t}")));
        }
        Ok(t)
    }

    pub fn build(&self, omega_tilde: f64) -> Result<PulseSequence, ConfigError> {
        if !self.r0.iter().all(|v| v.is_finite()) {
            return Err(ConfigError("sequence.r0 must be finite".into()));
        }
        let seq = match self.kind {
            SequenceSelect::Up => preset_up(self.r0, self.interval(omega_tilde)?),
            SequenceSelect::Cp => preset_cp(self.r0, self.interval(omega_tilde)?),
            SequenceSelect::Custom => PulseSequence {
                name: "custom".into(),
                primitives: self
                    .primitives
                    .clone()
                    .ok_or_else(|| ConfigError("sequence.primitives is required for kind = custom".into()))?,
            },
        };
        if self.kind != SequenceSelect::Custom && self.primitives.is_some() {
            return Err(ConfigError("sequence.primitives is only allowed for kind = custom".into()));
        }
        seq.validate().map_err(key_err("sequence"))?;
        Ok(seq)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpec {
    pub temperature: Option<f64>,
    pub n_plus: Option<f64>,
    pub n_minus: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    10_000
}

impl Default for ThermalSpec {
    fn default() -> Self {
        ThermalSpec { temperature: None, n_plus: None, n_minus: None, count: default_count() }
    }
}

impl ThermalSpec {
    pub fn build(&self, modes: &crate::dynamics::NormalModes) -> Result<ThermalParams, ConfigError> {
        let p = match (self.temperature, self.n_plus, self.n_minus) {
            (Some(t), None, None) => ThermalParams::from_temperature(modes, t),
            (None, Some(p), Some(m)) => ThermalParams::from_occupations(p, m),
            (None, None, None) => ThermalParams::from_temperature(modes, 0.0),
            _ => return Err(ConfigError("thermal: give either temperature, or both n_plus and n_minus".into())),
        };
        p.map_err(key_err("thermal"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSpec {
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Upper grid edge (rad/s); defaults to `3ω+`.
    pub omega_max: Option<f64>,
    /// Multiply the echo curve by 16 (plot convention).
    #[serde(default)]
    pub scale_cp_by_16: bool,
}

fn default_grid_points() -> usize {
    4096
}

impl Default for ResponseSpec {
    fn default() -> Self {
        ResponseSpec { grid_points: default_grid_points(), omega_max: None, scale_cp_by_16: false }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    1000
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec { samples: default_samples() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySpec {
    /// Defaults to the 1 μK reference apparatus at the large-N optimum.
    pub apparatus: Option<ApparatusParams>,
    /// Atoms per layer for the sweep; defaults to a log grid around N_c.
    pub atoms: Option<Vec<f64>>,
    #[serde(default)]
    pub ceiling: CeilingRate,
    pub search_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub trap: TrapSpec,
    #[serde(default)]
    pub species: SpeciesSpec,
    #[serde(default)]
    pub drive: Option<ForceSignal>,
    /// CSV file with columns `t_s, gx_m_s2, gy_m_s2` on a uniform grid.
    #[serde(default)]
    pub drive_csv: Option<PathBuf>,
    #[serde(default)]
    pub sequence: SequenceSpec,
    #[serde(default)]
    pub thermal: ThermalSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub response: ResponseSpec,
    #[serde(default)]
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub sensitivity: SensitivitySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str(&format!("{{\"schema_version\": {SCHEMA_VERSION}}}")).expect("default config parses")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Resolved drive; relative CSV paths are taken from `base`.
    pub fn drive(&self, base: &Path) -> Result<ForceSignal, ConfigError> {
        match (&self.drive, &self.drive_csv) {
            (Some(_), Some(_)) => Err(ConfigError("drive and drive_csv are mutually exclusive".into())),
            (Some(d), None) => {
                validate_drive(d).map_err(key_err("drive"))?;
                Ok(d.clone())
            }
            (None, Some(p)) => read_drive_csv(&base.join(p)),
            (None, None) => Ok(ForceSignal::Zero),
        }
    }

    /// Checks every section a command might use, before any computation.
    pub fn validate(&self, base: &Path) -> Result<(), ConfigError> {
        let trap = self.trap.build()?;
        let modes = trap.modes().map_err(key_err("trap"))?;
        self.species.build()?;
        self.drive(base)?;
        self.sequence.build(modes.omega_tilde)?;
        self.thermal.build(&modes)?;
        if self.thermal.count < 100 {
            return Err(ConfigError(format!("thermal.count must be ≥ 100, got {}", self.thermal.count)));
        }
        if self.response.grid_points < 2 {
            return Err(ConfigError("response.grid_points must be ≥ 2".into()));
        }
        if let Some(w) = self.response.omega_max {
            if !(w > 0.0) {
                return Err(ConfigError(format!("response.omega_max must be > 0, got {w}")));
            }
        }
        if self.trajectory.samples < 2 {
            return Err(ConfigError("trajectory.samples must be ≥ 2".into()));
        }
        if let Some(a) = &self.sensitivity.apparatus {
            a.validate().map_err(key_err("sensitivity.apparatus"))?;
        }
        if let Some(atoms) = &self.sensitivity.atoms {
            if atoms.is_empty() || atoms.iter().any(|n| !(*n >= 0.0 && n.is_finite())) {
                return Err(ConfigError("sensitivity.atoms must be a non-empty list of counts ≥ 0".into()));
            }
        }
        if let Some([lo, hi]) = self.sensitivity.search_range {
            if !(lo > 0.0 && hi > lo) {
                return Err(ConfigError(format!("sensitivity.search_range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

fn validate_drive(d: &ForceSignal) -> crate::Result<()> {
    match d {
        ForceSignal::Tabulated(t) => Tabulated::new(t.t0, t.dt, t.samples.clone()).map(|_| ()),
        ForceSignal::Sum { terms } => terms.iter().try_for_each(validate_drive),
        ForceSignal::Sinusoid { amplitude, omega, phase } => {
            if amplitude.iter().chain([omega, phase]).all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(crate::Error::Parameter("sinusoid fields must be finite".into()))
            }
        }
        ForceSignal::Constant { g } if !g.iter().all(|v| v.is_finite()) => {
            Err(crate::Error::Parameter("constant drive must be finite".into()))
        }
        _ => Ok(()),
    }
}

fn read_drive_csv(path: &Path) -> Result<ForceSignal, ConfigError> {
    let err = key_err::<String>("drive_csv");
    let mut rdr = csv::Reader::from_path(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        if row.len() != 3 {
            return Err(err(format!("row {}: expected 3 columns, got {}", k + 1, row.len())));
        }
        let mut v = [0.0; 3];
        for (j, cell) in row.iter().enumerate() {
            v[j] = cell.trim().parse().map_err(|e| err(format!("row {}: {e}", k + 1)))?;
        }
        times.push(v[0]);
        samples.push([v[1], v[2]]);
    }
    if times.len() < 2 {
        return Err(err("need at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(err(format!("row {}: time grid is not uniform", k + 2)));
        }
    }
    Tabulated::new(times[0], dt, samples).map(ForceSignal::Tabulated).map_err(|e| err(e.to_string()))
}
