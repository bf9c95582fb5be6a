use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{exp_integral, gauss_legendre};

/// Uniformly sampled acceleration with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<[f64; 2]>,
}

impl Tabulated {
    pub fn new(t0: f64, dt: f64, samples: Vec<[f64; 2]>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("tabulated drive step must be positive, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Parameter("tabulated drive needs at least two samples".into()));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("tabulated drive contains non-finite samples".into()));
        }
        Ok(Tabulated { t0, dt, samples })
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.dt * (self.samples.len() - 1) as f64
    }

    fn covers(&self, a: f64, b: f64) -> bool {
        let slack = 1e-9 * self.dt;
        a >= self.t0 - slack && b <= self.end() + slack
    }

    fn eval(&self, t: f64) -> [f64; 2] {
        let u = ((t - self.t0) / self.dt).max(0.0);
        let last = self.samples.len() - 1;
        let k = (u.floor() as usize).min(last - 1);
        let frac = (u - k as f64).clamp(0.0, 1.0);
        let (lo, hi) = (self.samples[k], self.samples[k + 1]);
        [lo[0] + frac * (hi[0] - lo[0]), lo[1] + frac * (hi[1] - lo[1])]
    }
}

/// One term of `g(t) = Σ weight · e^{−iωt}` (complex conjugate pairs
/// included so the sum is real).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub omega: f64,
    pub weight: [Complex64; 2],
}

/// Time-dependent acceleration g(t), m/s².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceSignal {
    Zero,
    Constant {
        g: [f64; 2],
    },
    /// `amplitude · cos(omega·t + phase)`.
    Sinusoid {
        amplitude: [f64; 2],
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    Sum {
        terms: Vec<ForceSignal>,
    },
    Tabulated(Tabulated),
}

impl ForceSignal {
    pub fn sinusoid(amplitude: [f64; 2], omega: f64, phase: f64) -> Self {
        ForceSignal::Sinusoid { amplitude, omega, phase }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ForceSignal::Zero => true,
            ForceSignal::Constant { g } => g == &[0.0, 0.0],
            ForceSignal::Sinusoid { amplitude, .. } => amplitude == &[0.0, 0.0],
            ForceSignal::Sum { terms } => terms.iter().all(ForceSignal::is_zero),
            ForceSignal::Tabulated(_) => false,
        }
    }

    /// Same waveform with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> ForceSignal {
        let s = |v: &[f64; 2]| [v[0] * factor, v[1] * factor];
        match self {
            ForceSignal::Zero => ForceSignal::Zero,
            ForceSignal::Constant { g } => ForceSignal::Constant { g: s(g) },
            ForceSignal::Sinusoid { amplitude, omega, phase } => ForceSignal::Sinusoid {
                amplitude: s(amplitude),
                omega: *omega,
                phase: *phase,
            },
            ForceSignal::Sum { terms } => ForceSignal::Sum {
                terms: terms.iter().map(|t| t.scaled(factor)).collect(),
            },
            ForceSignal::Tabulated(tab) => ForceSignal::Tabulated(Tabulated {
                t0: tab.t0,
                dt: tab.dt,
                samples: tab.samples.iter().map(s).collect(),
            }),
        }
    }

    /// Errors when a tabulated component does not cover `[a, b]`.
    pub fn check_coverage(&self, a: f64, b: f64) -> Result<()> {
        match self {
            ForceSignal::Tabulated(tab) if !tab.covers(a, b) => Err(Error::Coverage {
                start: tab.t0,
                end: tab.end(),
                req_start: a,
                req_end: b,
            }),
            ForceSignal::Sum { terms } => terms.iter().try_for_each(|t| t.check_coverage(a, b)),
            _ => Ok(()),
        }
    }

    /// g(t); fails outside a tabulated grid.
    pub fn eval(&self, t: f64) -> Result<[f64; 2]> {
        self.check_coverage(t, t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> [f64; 2] {
        match self {
            ForceSignal::Zero => [0.0, 0.0],
            ForceSignal::Constant { g } => *g,
            ForceSignal::Sinusoid { amplitude, omega, phase } => {
                let c = (omega * t + phase).cos();
                [amplitude[0] * c, amplitude[1] * c]
            }
            ForceSignal::Sum { terms } => terms.iter().fold([0.0, 0.0], |acc, term| {
                let v = term.eval_unchecked(t);
                [acc[0] + v[0], acc[1] + v[1]]
            }),
            ForceSignal::Tabulated(tab) => tab.eval(t),
        }
    }

    /// Grid knots of tabulated components strictly inside `(a, b)`.
    pub(crate) fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            ForceSignal::Tabulated(tab) => {
                let first = ((a - tab.t0) / tab.dt).floor().max(0.0) as usize;
                (first..tab.samples.len())
                    .map(|k| tab.t0 + k as f64 * tab.dt)
                    .skip_while(|&t| t <= a)
                    .take_while(|&t| t < b)
                    .collect()
            }
            ForceSignal::Sum { terms } => {
                let mut all: Vec<f64> = terms.iter().flat_map(|t| t.breakpoints(a, b)).collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                all
            }
            _ => Vec::new(),
        }
    }

    /// Highest angular frequency present, used to size quadrature panels.
    pub fn max_frequency(&self) -> f64 {
        match self {
            ForceSignal::Zero | ForceSignal::Constant { .. } => 0.0,
            ForceSignal::Sinusoid { omega, .. } => omega.abs(),
            ForceSignal::Sum { terms } => terms.iter().map(ForceSignal::max_frequency).fold(0.0, f64::max),
            ForceSignal::Tabulated(tab) => std::f64::consts::PI / tab.dt,
        }
    }

    /// Exact line spectrum for analytic waveforms; `None` for tabulated data.
    pub fn spectral_lines(&self) -> Option<Vec<SpectralLine>> {
        match self {
            ForceSignal::Zero => Some(Vec::new()),
            ForceSignal::Constant { g } => Some(vec![SpectralLine {
                omega: 0.0,
                weight: [g[0].into(), g[1].into()],
            }]),
            ForceSignal::Sinusoid { amplitude, omega, phase } => {
                // cos(Ωt+φ) = ½e^{−i(−Ω)t}e^{iφ} + ½e^{−iΩt}e^{−iφ}
                let pos = Complex64::from_polar(0.5, -phase);
                let neg = Complex64::from_polar(0.5, *phase);
                Some(vec![
                    SpectralLine { omega: *omega, weight: [pos * amplitude[0], pos * amplitude[1]] },
                    SpectralLine { omega: -omega, weight: [neg * amplitude[0], neg * amplitude[1]] },
                ])
            }
            ForceSignal::Sum { terms } => {
                let mut lines = Vec::new();
                for t in terms {
                    lines.extend(t.spectral_lines()?);
                }
                Some(lines)
            }
            ForceSignal::Tabulated(_) => None,
        }
    }

    /// Discrete transform `Σ_k g(t_k) e^{iωt_k} Δt` of the tabulated samples
    /// (trapezoid weights). Analytic signals are sampled on `[0, span]`.
    pub fn discrete_transform(&self, omega: f64) -> Option<[Complex64; 2]> {
        let ForceSignal::Tabulated(tab) = self else {
            return None;
        };
        let n = tab.samples.len();
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for (k, s) in tab.samples.iter().enumerate() {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 } * tab.dt;
            let ph = Complex64::from_polar(w, omega * (tab.t0 + k as f64 * tab.dt));
            acc[0] += ph * s[0];
            acc[1] += ph * s[1];
        }
        Some(acc)
    }

    /// `∫_a^b e^{iν(s−a)} g(s) ds` per component. Closed form for analytic
    /// waveforms, composite Gauss–Legendre per grid cell for tabulated data.
    pub fn mode_integral(&self, nu: f64, a: f64, b: f64) -> [Complex64; 2] {
        let span = b - a;
        if span <= 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        match self {
            ForceSignal::Zero => [Complex64::new(0.0, 0.0); 2],
            ForceSignal::Constant { g } => {
                let e = exp_integral(nu, span);
                [e * g[0], e * g[1]]
            }
            ForceSignal::Sinusoid { amplitude, omega, phase } => {
                let theta = omega * a + phase;
                let e = 0.5
                    * (Complex64::from_polar(1.0, theta) * exp_integral(nu + omega, span)
                        + Complex64::from_polar(1.0, -theta) * exp_integral(nu - omega, span));
                [e * amplitude[0], e * amplitude[1]]
            }
            ForceSignal::Sum { terms } => terms.iter().fold([Complex64::new(0.0, 0.0); 2], |acc, t| {
                let v = t.mode_integral(nu, a, b);
                [acc[0] + v[0], acc[1] + v[1]]
            }),
            ForceSignal::Tabulated(tab) => {
                let first = (((a - tab.t0) / tab.dt).floor().max(0.0)) as usize;
                let mut out = [Complex64::new(0.0, 0.0); 2];
                let mut cell = first;
                loop {
                    let lo = (tab.t0 + cell as f64 * tab.dt).max(a);
                    let hi = (tab.t0 + (cell + 1) as f64 * tab.dt).min(b);
                    if hi > lo {
                        let panels = ((hi - lo) * nu.abs() / 1.5).ceil().max(1.0) as usize;
                        for (c, slot) in out.iter_mut().enumerate() {
                            *slot += gauss_legendre(lo, hi, panels, |s| {
                                Complex64::from_polar(tab.eval(s)[c], nu * (s - a))
                            });
                        }
                    }
                    cell += 1;
                    if tab.t0 + cell as f64 * tab.dt >= b {
                        break;
                    }
                }
                out
            }
        }
    }
}
