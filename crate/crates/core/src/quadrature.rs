//! Composite quadrature rules shared by the phase and drive integrals.

use num_complex::Complex64;

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre rule on `[a, b]` split into `panels`
/// equal panels.
pub fn gauss_legendre<F>(a: f64, b: f64, panels: usize, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            acc += (f(mid - half * x) + f(mid + half * x)) * *w;
        }
        total += acc * half;
    }
    total
}

/// Nodes and weights of the composite 8-point rule, in increasing order.
pub fn gauss_legendre_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let half = 0.5 * h;
    let mut out = Vec::with_capacity(8 * panels);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for i in (0..4).rev() {
            out.push((mid - half * GL8_NODES[i], half * GL8_WEIGHTS[i]));
        }
        for i in 0..4 {
            out.push((mid + half * GL8_NODES[i], half * GL8_WEIGHTS[i]));
        }
    }
    out
}

/// Real-valued convenience wrapper around [`gauss_legendre`].
pub fn gauss_legendre_real<F>(a: f64, b: f64, panels: usize, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    gauss_legendre(a, b, panels, |s| Complex64::new(f(s), 0.0)).re
}

/// Composite Simpson rule with nominal step `step`. When `step` does not
/// divide `b - a`, the leftover partial interval is closed with a
/// trapezoid.
pub fn simpson<F>(a: f64, b: f64, step: f64, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    let span = b - a;
    if span <= 0.0 {
        return 0.0;
    }
    let mut n = (span / step).floor() as usize;
    // tolerate round-off on an exact division
    if (span - (n as f64 + 1.0) * step).abs() <= 1e-9 * step {
        n += 1;
    }
    if n % 2 == 1 {
        n -= 1;
    }
    let body_end = a + n as f64 * step;
    let mut total = 0.0;
    if n >= 2 {
        let mut acc = f(a) + f(body_end);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * step);
        }
        total += acc * step / 3.0;
    }
    let rest = b - body_end;
    if rest > 1e-12 * span {
        total += 0.5 * rest * (f(body_end) + f(b));
    }
    total
}

/// `∫₀ᵀ e^{iνs} ds`, evaluated without cancellation near ν = 0.
pub fn exp_integral(nu: f64, duration: f64) -> Complex64 {
    let half = 0.5 * nu * duration;
    Complex64::from_polar(duration * sinc(half), half)
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
