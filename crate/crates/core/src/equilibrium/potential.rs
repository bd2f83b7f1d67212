use std::f64::consts::PI;

use serde::Serialize;

use super::constant::{c_closed, check_alpha_open, r_of_alpha};
use super::measure::{mu_alpha, potential};
use crate::quadrature::{integrate_singular, Singular, Tolerance};
use crate::{Error, Result};

/// Closed form of `d/dx U^{mu_alpha}(x)` on `(r, 1)`:
/// `1/2 log(1 - x^2) - log(alpha + sqrt(x^2 - r^2))`.
pub fn potential_derivative_closed(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    if !(x > r && x < 1.0) {
        return Err(Error::invalid(format!("x = {x} is outside (r, 1) = ({r}, 1)")));
    }
    let s = ((x - r) * (x + r)).sqrt();
    Ok(0.5 * ((1.0 - x) * (1.0 + x)).ln() - (alpha + s).ln())
}

/// `I_alpha(x) = log(1 + x) - log(alpha + sqrt(x^2 - r^2))` for `x > r`,
/// evaluated without cancellation for large `x`.
pub fn i_alpha_closed(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    if !(x > r) || !x.is_finite() {
        return Err(Error::invalid(format!("x = {x} must exceed r = {r}")));
    }
    let s = ((x - r) * (x + r)).sqrt();
    // (1 + x) / (alpha + s) = 1 + (1 - alpha + x - s) / (alpha + s), x - s = r^2 / (x + s)
    Ok(((1.0 - alpha + r * r / (x + s)) / (alpha + s)).ln_1p())
}

/// `(1/pi) int_{-r}^{r} arccos(alpha / sqrt(1 - y^2)) / (x - y) dy` by
/// quadrature in `y = r sin(theta)`.
pub fn i_alpha_quadrature(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    if !(x > r) || !x.is_finite() {
        return Err(Error::invalid(format!("x = {x} must exceed r = {r}")));
    }
    let gap = x - r;
    // x - r sin(t) = gap + 2 r sin^2(pi/4 - t/2); singular only as gap -> 0.
    let f = |t: f64, _d: f64| {
        let c = r * t.cos();
        let q = (std::f64::consts::FRAC_PI_4 - 0.5 * t).sin();
        (c / alpha).atan() * c / (PI * (gap + 2.0 * r * q * q))
    };
    let h = std::f64::consts::FRAC_PI_2;
    let mut pts = vec![-h, h];
    if gap < 0.1 {
        for k in 1..8 {
            pts.push(h - 0.1f64.powi(k));
        }
        pts.sort_by(|a, b| a.total_cmp(b));
    }
    let tol = Tolerance::new(1e-13, 1e-13);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate_singular(f, w[0], w[1], Singular::None, tol)?.value;
    }
    Ok(total)
}

/// Potential values of `mu_alpha` that pin down `C(alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumData {
    pub alpha: f64,
    pub r: f64,
    /// Value of the potential on `[-r, r]`, sampled at 0.
    pub ell_alpha: f64,
    pub potential_at_r: f64,
    pub potential_at_1: f64,
    /// `U(r) - U(1)`.
    pub c_check: f64,
    pub c_closed: f64,
    /// Max minus min of the potential over 51 points of `[-r, r]`.
    pub support_spread: f64,
}

/// Evaluates the potential of `mu_alpha` at `0`, `r` and `1` and checks that
/// its minimum over the saturated region is at `+-1`.
pub fn equilibrium_data(alpha: f64) -> Result<EquilibriumData> {
    let m = mu_alpha(alpha)?;
    let r = m.r;
    let u = |x: f64| potential(&m.measure, x);
    let ell_alpha = u(0.0)?;
    let potential_at_r = u(r)?;
    let potential_at_1 = u(1.0)?;

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=50 {
        let v = u(-r + 2.0 * r * k as f64 / 50.0)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for k in 0..=64 {
        let x = r + (1.0 - r) * k as f64 / 64.0;
        for y in [x, -x] {
            if u(y)? < potential_at_1 - 1e-9 {
                return Err(Error::numeric(format!(
                    "potential of mu_alpha at {y} is below its value at 1"
                )));
            }
        }
    }
    Ok(EquilibriumData {
        alpha,
        r,
        ell_alpha,
        potential_at_r,
        potential_at_1,
        c_check: potential_at_r - potential_at_1,
        c_closed: c_closed(alpha)?,
        support_spread: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_closed_values() {
        let v = potential_derivative_closed(0.6, 0.9).unwrap();
        assert!((v - (0.5 * 0.19f64.ln() - (0.6 + 0.17f64.sqrt()).ln())).abs() < 1e-15);
        assert!(potential_derivative_closed(0.6, 1.0 - 1e-15).unwrap() < -15.0);
        assert!(potential_derivative_closed(0.6, 0.8).is_err());
        assert!(potential_derivative_closed(0.6, 1.0).is_err());
    }

    #[test]
    fn derivative_negative() {
        for alpha in [0.3, 0.5, 0.7] {
            let r = r_of_alpha(alpha);
            for k in 1..=20 {
                let x = r + (1.0 - r) * k as f64 / 21.0;
                assert!(potential_derivative_closed(alpha, x).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let alpha = 0.6;
        let m = mu_alpha(alpha).unwrap();
        let h = 1e-4;
        for x in [0.84, 0.9, 0.95] {
            let fd = (potential(&m.measure, x + h).unwrap() - potential(&m.measure, x - h).unwrap()) / (2.0 * h);
            let exact = potential_derivative_closed(alpha, x).unwrap();
            assert!(((fd - exact) / exact).abs() < 1e-5, "{x}: {fd} vs {exact}");
        }
    }

    #[test]
    fn i_alpha_against_quadrature() {
        for x in [0.81, 0.9, 2.0, 30.0] {
            let c = i_alpha_closed(0.6, x).unwrap();
            let q = i_alpha_quadrature(0.6, x).unwrap();
            assert!((c - q).abs() < 1e-7, "{x}: {c} vs {q}");
        }
        assert!(i_alpha_closed(0.6, 1e8).unwrap().abs() < 1e-7);
        assert!(i_alpha_closed(0.6, 0.8).is_err());
    }

    #[test]
    fn c_from_potential() {
        for alpha in [0.5, 0.8] {
            let d = equilibrium_data(alpha).unwrap();
            assert!((d.c_check - d.c_closed).abs() < 1e-6, "{alpha}: {d:?}");
            assert!(d.support_spread < 1e-6);
        }
    }
}
