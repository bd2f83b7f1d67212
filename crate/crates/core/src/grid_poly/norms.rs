use serde::{Deserialize, Serialize};

use super::{roots::spectrum, ChebPoly, Grid};
use crate::{Error, Result};

/// Disagreement between the critical-point and sampling estimates that is
/// reported as a failure.
const SUP_DISAGREE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNorm {
    pub value: f64,
    pub argmax_index: usize,
}

/// `max |p|` over `[lo, hi]`.
///
/// Candidates are the endpoints and the real roots of `p'`; an independent
/// estimate comes from `30 (d + 1)` Chebyshev-spaced samples refined by golden
/// section around the best sample. The larger of the two is returned.
pub fn sup_norm_interval(p: &ChebPoly, lo: f64, hi: f64) -> Result<SupNorm> {
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let t = p.truncated();
    let d = t.degree();
    if d == 0 {
        return Ok(SupNorm {
            value: t.coeffs()[0].abs(),
            argmax: lo,
        });
    }

    let abs_at = |x: f64| t.eval(x).abs();
    let mut best = SupNorm {
        value: abs_at(lo),
        argmax: lo,
    };
    let consider = |x: f64, best: &mut SupNorm| {
        let v = abs_at(x);
        if v > best.value {
            *best = SupNorm { value: v, argmax: x };
        }
    };
    consider(hi, &mut best);
    for z in spectrum(&t.derivative())?.real {
        if z > lo && z < hi {
            consider(z, &mut best);
        }
    }
    let critical = best;

    let m = 30 * (d + 1);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let samples: Vec<f64> = (0..=m)
        .map(|i| mid - half * (std::f64::consts::PI * i as f64 / m as f64).cos())
        .collect();
    let (ibest, _) = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, abs_at(x)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let a = samples[ibest.saturating_sub(1)];
    let b = samples[(ibest + 1).min(m)];
    let x = golden_max(&abs_at, a, b, 1e-15 * (hi - lo).max(1.0));
    let mut sampled = SupNorm {
        value: abs_at(samples[ibest]),
        argmax: samples[ibest],
    };
    if abs_at(x) > sampled.value {
        sampled = SupNorm { value: abs_at(x), argmax: x };
    }

    let top = critical.value.max(sampled.value);
    if top > 0.0 && (critical.value - sampled.value).abs() > SUP_DISAGREE_TOL * top {
        return Err(Error::numeric(format!(
            "sup norm estimates disagree: critical points {:.17e} at {}, sampling {:.17e} at {}",
            critical.value, critical.argmax, sampled.value, sampled.argmax
        )));
    }
    Ok(if critical.value >= sampled.value {
        critical
    } else {
        sampled
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// `max_k |p(xi_k)|`, lowest index on ties.
pub fn grid_norm(p: &ChebPoly, g: &Grid) -> GridNorm {
    let mut best = GridNorm {
        value: 0.0,
        argmax_index: 0,
    };
    for (k, &x) in g.points().iter().enumerate() {
        let v = p.eval(x).abs();
        if v > best.value {
            best = GridNorm {
                value: v,
                argmax_index: k,
            };
        }
    }
    best
}
