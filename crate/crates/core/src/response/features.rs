use serde::Serialize;

use super::analytic::ResponseCurve;
use crate::error::{Error, Result};

/// A minimum of |F| is reported as a zero when its refined depth is below
/// this fraction of the curve's peak magnitude.
const ZERO_DEPTH: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub omega: f64,
    pub magnitude: f64,
}

fn check_resolution(curve: &ResponseCurve) -> Result<()> {
    let required = 2.0 * std::f64::consts::PI / curve.t / 20.0;
    let spacing = curve.spacing();
    if spacing < required {
        Ok(())
    } else {
        Err(Error::Resolution { spacing, required })
    }
}

/// Vertex of the parabola through `(x−h, a), (x, b), (x+h, c)`:
/// returns (offset from x, value at vertex).
fn parabola_vertex(a: f64, b: f64, c: f64, h: f64) -> (f64, f64) {
    let curv = a - 2.0 * b + c;
    if curv == 0.0 {
        return (0.0, b);
    }
    let off = 0.5 * h * (a - c) / curv;
    let off = off.clamp(-h, h);
    let value = b - 0.25 * (a - c) * off / h;
    (off, value)
}

/// Frequencies where |F| vanishes, from local minima of |F|² refined by
/// parabolic interpolation. A grid endpoint counts when it is a minimum.
pub fn find_zeros(curve: &ResponseCurve) -> Result<Vec<f64>> {
    check_resolution(curve)?;
    let p: Vec<f64> = curve.values.iter().map(|v| v.norm_sqr()).collect();
    let h = curve.spacing();
    let floor = (ZERO_DEPTH * curve.peak_magnitude()).powi(2);
    let n = p.len();
    let mut zeros = Vec::new();
    if p[0] <= p[1] && p[0] <= floor {
        zeros.push(curve.omega[0]);
    }
    for k in 1..n - 1 {
        if p[k] <= p[k - 1] && p[k] < p[k + 1] {
            let (off, depth) = parabola_vertex(p[k - 1], p[k], p[k + 1], h);
            if depth.max(0.0) <= floor {
                zeros.push(curve.omega[k] + off);
            }
        }
    }
    if p[n - 1] < p[n - 2] && p[n - 1] <= floor {
        zeros.push(curve.omega[n - 1]);
    }
    Ok(zeros)
}

/// Interior local maxima of |F| with parabolic refinement, tallest first.
pub fn find_peaks(curve: &ResponseCurve) -> Result<Vec<Peak>> {
    check_resolution(curve)?;
    let a: Vec<f64> = curve.values.iter().map(|v| v.norm()).collect();
    let h = curve.spacing();
    let mut peaks: Vec<Peak> = (1..a.len() - 1)
        .filter(|&k| a[k] > a[k - 1] && a[k] >= a[k + 1])
        .map(|k| {
            let (off, mag) = parabola_vertex(a[k - 1], a[k], a[k + 1], h);
            Peak { omega: curve.omega[k] + off, magnitude: mag }
        })
        .collect();
    peaks.sort_by(|x, y| y.magnitude.total_cmp(&x.magnitude));
    Ok(peaks)
}

/// Full width at half maximum of |F|² around the tallest grid point, with
/// linear interpolation of the crossings. `None` when a crossing falls off
/// the grid.
pub fn main_lobe_fwhm(curve: &ResponseCurve) -> Option<f64> {
    let p: Vec<f64> = curve.values.iter().map(|v| v.norm_sqr()).collect();
    let (k, &top) = p.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1))?;
    let half = 0.5 * top;
    let w = &curve.omega;
    let cross = |i: usize, j: usize| w[i] + (half - p[i]) / (p[j] - p[i]) * (w[j] - w[i]);
    let left = (0..k).rev().find(|&i| p[i] < half).map(|i| cross(i, i + 1))?;
    let right = (k + 1..p.len()).find(|&i| p[i] < half).map(|i| cross(i - 1, i))?;
    Some(right - left)
}
