use nalgebra::{linalg::Schur, DMatrix};
use serde::{Deserialize, Serialize};

use super::ChebPoly;
use crate::{Error, Result};

/// Eigenvalues with imaginary part below this (relative to `max(1, |re|)`)
/// are treated as real roots and polished on the real line.
const REAL_IMAG_TOL: f64 = 1e-8;
const SCHUR_MAX_ITER: usize = 10_000;
const NEWTON_STEPS: usize = 8;
const ZERO_RESIDUAL_TOL: f64 = 1e-9;
const EVAL_NOISE: f64 = 64.0;

/// Sorted real roots of a polynomial in a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    /// Largest `|p(z)| / max(1, local sup of |p|)` over the zeros.
    pub residual: f64,
    /// Largest evaluation rounding level `64 eps sum |c_j T_j(z)|` on the
    /// same scale; residuals below it are accepted.
    pub eval_noise: f64,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// All roots of a polynomial: polished real ones and the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSpectrum {
    /// Degree after truncation (number of eigenvalues).
    pub degree: usize,
    /// Real roots, sorted, polished by Newton.
    pub real: Vec<f64>,
    /// Non-real roots as `(re, im)`, one entry per eigenvalue.
    pub complex: Vec<(f64, f64)>,
}

/// Colleague matrix of a truncated Chebyshev series of degree `d >= 2`.
fn colleague(c: &[f64]) -> DMatrix<f64> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut m = DMatrix::zeros(d, d);
    m[(0, 1)] = 1.0;
    for j in 1..d {
        m[(j, j - 1)] = 0.5;
        if j + 1 < d {
            m[(j, j + 1)] = 0.5;
        }
    }
    for k in 0..d {
        m[(d - 1, k)] -= 0.5 * c[k] / lead;
    }
    m
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= inv;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn polish(p: &ChebPoly, dp: &ChebPoly, mut x: f64) -> f64 {
    let mut fx = p.eval(x).abs();
    for _ in 0..NEWTON_STEPS {
        if fx == 0.0 {
            break;
        }
        let slope = dp.eval(x);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let step = p.eval(x) / slope;
        let next = x - step;
        let fnext = p.eval(next).abs();
        if !(fnext < fx) {
            break;
        }
        x = next;
        fx = fnext;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Eigenvalues of the colleague matrix, real ones polished.
pub fn spectrum(p: &ChebPoly) -> Result<RootSpectrum> {
    let t = p.truncated();
    let c = t.coeffs();
    let d = c.len() - 1;
    if d == 0 {
        return Ok(RootSpectrum {
            degree: 0,
            real: vec![],
            complex: vec![],
        });
    }
    let dp = t.derivative();
    if d == 1 {
        let z = polish(&t, &dp, -c[0] / c[1]);
        return Ok(RootSpectrum {
            degree: 1,
            real: vec![z],
            complex: vec![],
        });
    }
    let mut m = colleague(c);
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
        Error::numeric(format!(
            "colleague eigenvalue iteration did not converge (degree {d}, max |c| {:.3e}, |c_d| {:.3e})",
            t.max_abs_coeff(),
            c[d].abs()
        ))
    })?;
    let eig = schur.complex_eigenvalues();
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for z in eig.iter() {
        if z.im.abs() <= REAL_IMAG_TOL * z.re.abs().max(1.0) {
            real.push(polish(&t, &dp, z.re));
        } else {
            complex.push((z.re, z.im));
        }
    }
    real.sort_by(|a, b| a.total_cmp(b));
    Ok(RootSpectrum {
        degree: d,
        real,
        complex,
    })
}

/// Real roots in `[lo, hi]`, local scale measured over half the average root
/// spacing.
pub fn roots_in_window(p: &ChebPoly, lo: f64, hi: f64) -> Result<ZeroSet> {
    let d = p.degree().max(1);
    roots_in_window_with_spacing(p, lo, hi, (hi - lo) / (2.0 * (d + 1) as f64))
}

/// Real roots in `[lo, hi]`; `h` is the half-width used for the local-scale
/// residual check (normally the grid spacing).
pub fn roots_in_window_with_spacing(p: &ChebPoly, lo: f64, hi: f64, h: f64) -> Result<ZeroSet> {
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty window [{lo}, {hi}]")));
    }
    let spec = spectrum(p)?;
    let slack = 1e-12 * (hi - lo);
    let mut zeros: Vec<f64> = spec
        .real
        .into_iter()
        .filter(|&z| z >= lo - slack && z <= hi + slack)
        .map(|z| z.clamp(lo, hi))
        .collect();
    zeros.dedup_by(|b, a| (*b - *a).abs() <= 1e-13 * a.abs().max(1.0));
    let mut residual = 0.0f64;
    let mut eval_noise = 0.0f64;
    for &z in &zeros {
        let scale = local_sup(p, z, h).max(1.0);
        let r = p.eval(z).abs() / scale;
        let noise = EVAL_NOISE * f64::EPSILON * p.abs_term_sum(z) / scale;
        if r > ZERO_RESIDUAL_TOL.max(noise) {
            return Err(Error::numeric(format!(
                "root residual {r:.3e} at {z} exceeds {ZERO_RESIDUAL_TOL:e} (rounding level {noise:.3e})"
            )));
        }
        residual = residual.max(r);
        eval_noise = eval_noise.max(noise);
    }
    Ok(ZeroSet { zeros, residual, eval_noise })
}

fn local_sup(p: &ChebPoly, z: f64, h: f64) -> f64 {
    (0..=16)
        .map(|i| p.eval(z - h + 2.0 * h * i as f64 / 16.0).abs())
        .fold(0.0, f64::max)
}
