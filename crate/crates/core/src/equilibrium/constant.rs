use crate::quadrature::{integrate_singular, Singular, Tolerance};
use crate::{Error, Result};

fn check_alpha_closed(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

pub(crate) fn check_alpha_open(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// `r = sqrt(1 - alpha^2)`, the edge of the unsaturated region.
pub fn r_of_alpha(alpha: f64) -> f64 {
    ((1.0 - alpha) * (1.0 + alpha)).sqrt()
}

/// `C(alpha) = ((1 + a) log(1 + a) + (1 - a) log(1 - a)) / 2`.
pub fn c_closed(alpha: f64) -> Result<f64> {
    check_alpha_closed(alpha)?;
    Ok(0.5 * ((1.0 + alpha) * alpha.ln_1p() + (1.0 - alpha) * (-alpha).ln_1p()))
}

/// Partial sum `sum_{k=1}^{terms} alpha^(2k) / (2k (2k - 1))`.
pub fn c_taylor(alpha: f64, terms: usize) -> Result<f64> {
    check_alpha_closed(alpha)?;
    if terms == 0 {
        return Err(Error::invalid("at least one Taylor term is required"));
    }
    let a2 = alpha * alpha;
    let mut pow = 1.0;
    let mut terms_v = Vec::with_capacity(terms);
    for k in 1..=terms {
        pow *= a2;
        let m = 2.0 * k as f64;
        terms_v.push(pow / (m * (m - 1.0)));
    }
    // Smallest terms first.
    Ok(terms_v.iter().rev().sum())
}

/// `int_r^1 [log(alpha + sqrt(x^2 - r^2)) - log(1 - x^2) / 2] dx`.
///
/// Split at the midpoint of `[r, 1]`: the square root at `x = r` and the
/// logarithm at `x = 1` are each removed by the `t^2` substitution.
pub fn c_integral(alpha: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    let m = 0.5 * (r + 1.0);
    let tol = Tolerance::new(1e-13, 1e-13);
    let left = integrate_singular(
        |x, d| {
            // x = r + d: sqrt(x^2 - r^2) = sqrt(d (2r + d)).
            let s = (d * (2.0 * r + d)).sqrt();
            (alpha + s).ln() - 0.5 * ((1.0 - x) * (1.0 + x)).ln()
        },
        r,
        m,
        Singular::Left,
        tol,
    )?;
    let right = integrate_singular(
        |x, d| {
            // x = 1 - d: 1 - x^2 = d (2 - d).
            let s = ((x - r) * (x + r)).sqrt();
            (alpha + s).ln() - 0.5 * (d * (2.0 - d)).ln()
        },
        m,
        1.0,
        Singular::Right,
        tol,
    )?;
    Ok(left.value + right.value)
}

/// The integrand of [`c_integral`] at `x in [r, 1)`.
pub fn c_integrand(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    if !(x >= r && x < 1.0) {
        return Err(Error::invalid(format!("x = {x} outside [r, 1) = [{r}, 1)")));
    }
    let s = ((x - r) * (x + r)).max(0.0).sqrt();
    Ok((alpha + s).ln() - 0.5 * ((1.0 - x) * (1.0 + x)).ln())
}

/// `dC/dalpha = (log(1 + alpha) - log(1 - alpha)) / 2 = atanh(alpha)`.
pub fn dc_dalpha(alpha: f64) -> Result<f64> {
    check_alpha_closed(alpha)?;
    Ok(alpha.atanh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(c_closed(0.0).unwrap(), 0.0);
        // 0.75 log 1.5 + 0.25 log 0.5
        let v = c_closed(0.5).unwrap();
        assert!((v - 0.130_812_035_941_137_3).abs() < 1e-15, "{v:.17}");
        assert!((c_closed(1.0 - 1e-9).unwrap() - std::f64::consts::LN_2).abs() < 1e-7);
        assert!(c_closed(1.0).is_err());
        assert!(c_closed(-0.1).is_err());
    }

    #[test]
    fn taylor_partial_sums() {
        assert_eq!(c_taylor(0.5, 1).unwrap(), 0.125);
        assert_eq!(c_taylor(0.0, 7).unwrap(), 0.0);
        assert!((c_taylor(0.5, 20).unwrap() - c_closed(0.5).unwrap()).abs() < 1e-12);
        assert!(c_taylor(0.5, 0).is_err());
    }

    #[test]
    fn integral_route() {
        for a in [0.1, 0.5] {
            assert!((c_integral(a).unwrap() - c_closed(a).unwrap()).abs() < 1e-8);
        }
        let r = r_of_alpha(0.6);
        assert!(c_integrand(0.6, r).unwrap().abs() < 1e-15);
    }

    #[test]
    fn derivative_values() {
        assert_eq!(dc_dalpha(0.0).unwrap(), 0.0);
        assert!((dc_dalpha(0.5).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        let h = 1e-6;
        for a in [0.2, 0.5, 0.8] {
            let fd = (c_closed(a + h).unwrap() - c_closed(a - h).unwrap()) / (2.0 * h);
            assert!((fd - dc_dalpha(a).unwrap()).abs() < 1e-6 * dc_dalpha(a).unwrap());
        }
        // int_r^1 (x^2 - r^2)^(-1/2) dx = log(1 + a) - log(1 - a^2) / 2
        let a: f64 = 0.5;
        let r = r_of_alpha(a);
        let q = integrate_singular(
            |_, d| 1.0 / (d * (2.0 * r + d)).sqrt(),
            r,
            1.0,
            Singular::Left,
            Tolerance::new(1e-14, 1e-14),
        )
        .unwrap()
        .value;
        let lhs = (1.0 + a).ln() - 0.5 * (1.0 - a * a).ln();
        assert!((q - lhs).abs() < 1e-12);
        assert!((lhs - dc_dalpha(a).unwrap()).abs() < 1e-15);
    }
}
