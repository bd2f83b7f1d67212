use serde::{Deserialize, Serialize};

use super::constant::{check_alpha_open, r_of_alpha};
use super::measure::{mu_alpha_density, potential, Density, Piece, PiecewiseMeasure};
use crate::quadrature::{integrate_singular, Singular, Tolerance};
use crate::{Error, Result};

/// Sampling parameters for [`j_functional`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JOptions {
    /// A point is unsaturated when its density is below `1/2 - threshold`.
    pub support_threshold: f64,
    /// Samples per interval before golden-section refinement.
    pub samples: usize,
}

impl Default for JOptions {
    fn default() -> Self {
        JOptions {
            support_threshold: 1e-9,
            samples: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JValue {
    pub j: f64,
    pub min_on_support: f64,
    pub argmin_on_support: f64,
    pub min_overall: f64,
    pub argmin_overall: f64,
    /// `supp(sigma - mu)` as closed intervals.
    pub support: Vec<(f64, f64)>,
}

const GOLDEN_TOL: f64 = 1e-10;

/// Minimum of `f` on `[a, b]`: sampling, then golden section on the best bracket.
fn minimize<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, samples: usize) -> Result<(f64, f64)> {
    let n = samples.max(3);
    let h = (b - a) / (n - 1) as f64;
    let (mut best_x, mut best) = (a, f64::INFINITY);
    let mut best_k = 0;
    for k in 0..n {
        let x = if k == n - 1 { b } else { a + h * k as f64 };
        let v = f(x)?;
        if v < best {
            (best_x, best, best_k) = (x, v, k);
        }
    }
    let mut lo = a + h * best_k.saturating_sub(1) as f64;
    let mut hi = (a + h * (best_k + 1) as f64).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            (hi, x2, f2) = (x2, x1, f1);
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            (lo, x1, f1) = (x1, x2, f2);
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best {
            (best_x, best) = (x, v);
        }
    }
    Ok((best_x, best))
}

fn minimize_over<F: Fn(f64) -> Result<f64>>(f: &F, parts: &[(f64, f64)], samples: usize) -> Result<(f64, f64)> {
    let mut best = (f64::NAN, f64::INFINITY);
    for &(a, b) in parts {
        let cand = if b > a { minimize(f, a, b, samples)? } else { (a, f(a)?) };
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// `J(mu) = min over supp(sigma - mu) of U^mu  -  min over [-1, 1] of U^mu`.
pub fn j_functional(m: &PiecewiseMeasure, opts: JOptions) -> Result<JValue> {
    let support = m.unsaturated_support(opts.support_threshold);
    if support.is_empty() {
        return Err(Error::invalid("supp(sigma - mu) is empty"));
    }
    let u = |x: f64| potential(m, x);
    let (argmin_on_support, min_on_support) = minimize_over(&u, &support, opts.samples)?;
    let bp = m.breakpoints();
    let parts: Vec<(f64, f64)> = bp.windows(2).map(|w| (w[0], w[1])).collect();
    let (mut argmin_overall, mut min_overall) = minimize_over(&u, &parts, opts.samples)?;
    if min_on_support < min_overall {
        (argmin_overall, min_overall) = (argmin_on_support, min_on_support);
    }
    Ok(JValue {
        j: min_on_support - min_overall,
        min_on_support,
        argmin_on_support,
        min_overall,
        argmin_overall,
        support,
    })
}

/// Logarithmic energy `I(mu) = int U^mu dmu`.
pub fn energy(m: &PiecewiseMeasure) -> Result<f64> {
    let tol = Tolerance::new(1e-11, 1e-11);
    let mut total = 0.0;
    for p in m.pieces() {
        let f = |x: f64, _d: f64| Ok::<f64, Error>(potential(m, x)? * p.density_at(x));
        // Quadrature errors inside the integrand are surfaced afterwards.
        let failure = std::cell::Cell::new(None);
        let est = integrate_singular(
            |x, d| match f(x, d) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e.to_string()));
                    0.0
                }
            },
            p.a,
            p.b,
            Singular::Both,
            tol,
        )?;
        if let Some(msg) = failure.take() {
            return Err(Error::numeric(msg));
        }
        total += est.value;
    }
    Ok(total)
}

const TABLE_NODES: usize = 801;

/// Odd tilt of `mu_alpha` on `[-r, r]`, renormalized to mass `alpha`.
fn tilted(alpha: f64, tau: f64) -> Result<PiecewiseMeasure> {
    let r = r_of_alpha(alpha);
    let xs: Vec<f64> = (0..TABLE_NODES)
        .map(|k| if k == TABLE_NODES - 1 { r } else { -r + 2.0 * r * k as f64 / (TABLE_NODES - 1) as f64 })
        .collect();
    let bump: Vec<f64> = xs.iter().map(|x| (r - x) * (r + x)).collect();
    let mut values: Vec<f64> = xs
        .iter()
        .zip(&bump)
        .map(|(&x, &b)| (mu_alpha_density(alpha, x) + tau * x * b / (r * r * r)).clamp(0.0, 0.5))
        .collect();
    values[0] = 0.5;
    values[TABLE_NODES - 1] = 0.5;
    let trap = |v: &[f64]| -> f64 { xs.windows(2).zip(v.windows(2)).map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0])).sum() };
    let delta = (alpha - (1.0 - r) - trap(&values)) / trap(&bump);
    for (v, b) in values.iter_mut().zip(&bump) {
        *v += delta * b;
    }
    PiecewiseMeasure::new(vec![
        Piece { a: -1.0, b: -r, density: Density::TruncatedSigma },
        Piece { a: -r, b: r, density: Density::Table { xs, values } },
        Piece { a: r, b: 1.0, density: Density::TruncatedSigma },
    ])
}

/// Five measures of mass `alpha` with density at most `1/2`, none equal to
/// `mu_alpha`: `alpha sigma`, `sigma` on `[-alpha, alpha]`, and three
/// perturbations of `mu_alpha` (flat interior, odd tilt, widened saturation).
pub fn test_family(alpha: f64) -> Result<Vec<(String, PiecewiseMeasure)>> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    let mut out = Vec::new();
    out.push((
        "scaled_sigma".to_string(),
        PiecewiseMeasure::new(vec![Piece { a: -1.0, b: 1.0, density: Density::Uniform { value: 0.5 * alpha } }])?,
    ));
    out.push((
        "sigma_on_center".to_string(),
        PiecewiseMeasure::new(vec![Piece { a: -alpha, b: alpha, density: Density::TruncatedSigma }])?,
    ));
    out.push((
        "flat_interior".to_string(),
        PiecewiseMeasure::new(vec![
            Piece { a: -1.0, b: -r, density: Density::TruncatedSigma },
            Piece { a: -r, b: r, density: Density::Uniform { value: (alpha - 1.0 + r) / (2.0 * r) } },
            Piece { a: r, b: 1.0, density: Density::TruncatedSigma },
        ])?,
    ));
    let mut tau = 0.1;
    let tilt = loop {
        match tilted(alpha, tau) {
            Ok(m) => break m,
            Err(_) if tau > 1e-3 => tau *= 0.5,
            Err(e) => return Err(e),
        }
    };
    out.push(("odd_tilt".to_string(), tilt));
    let s = 0.5 * (1.0 + r);
    out.push((
        "wide_saturation".to_string(),
        PiecewiseMeasure::new(vec![
            Piece { a: -1.0, b: -s, density: Density::TruncatedSigma },
            Piece { a: -s, b: s, density: Density::Uniform { value: (alpha - 1.0 + s) / (2.0 * s) } },
            Piece { a: s, b: 1.0, density: Density::TruncatedSigma },
        ])?,
    ));
    for (name, m) in &out {
        if (m.total_mass() - alpha).abs() > 1e-10 {
            return Err(Error::numeric(format!("test measure {name} has mass {}", m.total_mass())));
        }
    }
    Ok(out)
}
