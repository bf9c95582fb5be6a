use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::NormalModes;
use crate::error::{Error, Result};
use crate::quadrature::sinc;
use crate::units::HBAR;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Up,
    Cp,
}

/// Complex response per unit spectral weight of the perpendicular
/// acceleration, in rad/(m s⁻²·s). The signal phase for a real drive
/// `g⊥(t)` is `∫dω/2π g̃⊥(ω) F(ω)` with `g̃⊥(ω) = ∫g⊥(t)e^{iωt}dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurve {
    pub kind: SequenceKind,
    pub r0: f64,
    /// Free-evolution time of the first interval (s).
    pub t: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ResponseCurve {
    pub fn new(kind: SequenceKind, modes: &NormalModes, r0: f64, t: f64, omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() < 2 || omega.len() != values.len() {
            return Err(Error::Parameter("response grid needs ≥ 2 points and one value per point".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("response grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("response values must be finite".into()));
        }
        Ok(ResponseCurve { kind, r0, t, omega_plus: modes.omega_plus, omega_minus: modes.omega_minus, omega, values })
    }

    pub fn spacing(&self) -> f64 {
        (self.omega[self.omega.len() - 1] - self.omega[0]) / (self.omega.len() - 1) as f64
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same curve with values multiplied by `factor` (plot rescaling).
    pub fn scaled(&self, factor: f64) -> ResponseCurve {
        ResponseCurve { values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }

    /// `omega_rad_s,re,im,abs2` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Parameter(format!("csv output: {e}"));
        w.write_record(["omega_rad_s", "re_rad_per_m_s-2_s", "im_rad_per_m_s-2_s", "abs2"]).map_err(io)?;
        for (o, v) in self.omega.iter().zip(&self.values) {
            w.write_record([o.to_string(), v.re.to_string(), v.im.to_string(), v.norm_sqr().to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parameter(format!("csv output: {e}")))?;
        Ok(())
    }
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// 4096 points over `[0, 3ω+]`.
pub fn default_grid(modes: &NormalModes) -> Vec<f64> {
    uniform_grid(0.0, 3.0 * modes.omega_plus, 4096)
}

/// `f(ω) = sinc(ωt/2) e^{−iωt/2}`, i.e. `(1/t)∫₀ᵗe^{−iωs}ds`.
fn f_kernel(omega: f64, t: f64) -> Complex64 {
    sinc(0.5 * omega * t) * Complex64::from_polar(1.0, -0.5 * omega * t)
}

/// Ramsey response `(m/ħ)(i r0 t/2ω̃) Σ_{σ,τ} στ ω_{−σ} f(ω + τω_σ)`, the
/// transform of the kernel `2(m/ħ) r0 h⊥(s)` on `[0, t]`.
pub fn f0(modes: &NormalModes, r0: f64, t: f64, omega: f64) -> Complex64 {
    let (wp, wm) = (modes.omega_plus, modes.omega_minus);
    let sum = wm * f_kernel(omega + wp, t) - wm * f_kernel(omega - wp, t) - wp * f_kernel(omega + wm, t)
        + wp * f_kernel(omega - wm, t);
    (modes.mass / HBAR) * I * (r0 * t / (2.0 * modes.omega_tilde)) * sum
}

/// Echo response `2i sin(ωt)[F0 e^{iωt} + F0* e^{−iωt}] e^{−2iωt}`.
pub fn f_cp(modes: &NormalModes, r0: f64, t: f64, omega: f64) -> Complex64 {
    let a = f0(modes, r0, t, omega);
    let e = Complex64::from_polar(1.0, omega * t);
    2.0 * I * (omega * t).sin() * (a * e + a.conj() * e.conj()) * Complex64::from_polar(1.0, -2.0 * omega * t)
}

/// The echo response with the `e^{+2iωt}` final factor. Same modulus as
/// [`f_cp`]; kept for comparison only.
pub fn f_cp_as_printed(modes: &NormalModes, r0: f64, t: f64, omega: f64) -> Complex64 {
    let a = f0(modes, r0, t, omega);
    let e = Complex64::from_polar(1.0, omega * t);
    2.0 * I * (omega * t).sin() * (a * e + a.conj() * e.conj()) * Complex64::from_polar(1.0, 2.0 * omega * t)
}

fn curve<F>(kind: SequenceKind, modes: &NormalModes, r0: f64, t: f64, grid: &[f64], f: F) -> Result<ResponseCurve>
where
    F: Fn(&NormalModes, f64, f64, f64) -> Complex64 + Sync,
{
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("interrogation time must be > 0, got {t}")));
    }
    let values: Vec<Complex64> = grid.par_iter().map(|&w| f(modes, r0, t, w)).collect();
    ResponseCurve::new(kind, modes, r0, t, grid.to_vec(), values)
}

pub fn response_up(modes: &NormalModes, r0: f64, t: f64, grid: &[f64]) -> Result<ResponseCurve> {
    curve(SequenceKind::Up, modes, r0, t, grid, f0)
}

pub fn response_cp(modes: &NormalModes, r0: f64, t: f64, grid: &[f64]) -> Result<ResponseCurve> {
    curve(SequenceKind::Cp, modes, r0, t, grid, f_cp)
}
