use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::constant::{check_alpha_open, r_of_alpha};
use crate::quadrature::{integrate, integrate_singular, Singular, Tolerance};
use crate::{Error, Result};

/// Upper density bound of the class, `sigma = dx / 2`.
pub const SIGMA_DENSITY: f64 = 0.5;
/// Slack allowed above `SIGMA_DENSITY` when validating densities.
const DENSITY_SLACK: f64 = 1e-12;
const MASS_TOL: f64 = 1e-10;
const QUAD_TOL: Tolerance = Tolerance::new(1e-14, 1e-14);

/// Density on one piece. Serialized with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    Uniform { value: f64 },
    /// The arctan profile of `mu_alpha` on a sub-interval of `[-r, r]`.
    MuAlpha { alpha: f64 },
    /// Density 1/2 (the constraint itself).
    TruncatedSigma,
    /// Linear interpolation of `values` at the nodes `xs`.
    Table { xs: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub density: Density,
}

/// A measure on `[-1, 1]` with piecewise density; zero off the pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct PiecewiseMeasure {
    pieces: Vec<Piece>,
    total_mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    pieces: Vec<Piece>,
    /// Ignored on input; recomputed from the pieces.
    #[serde(default)]
    total_mass: f64,
}

impl TryFrom<MeasureRepr> for PiecewiseMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        PiecewiseMeasure::new(r.pieces)
    }
}

impl From<PiecewiseMeasure> for MeasureRepr {
    fn from(m: PiecewiseMeasure) -> Self {
        MeasureRepr {
            pieces: m.pieces,
            total_mass: m.total_mass,
        }
    }
}

/// `u log|u| - u`, an antiderivative of `log|u|`.
fn ulog(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln() - u
    }
}

/// `u^2/2 log|u| - u^2/4`, an antiderivative of `u log|u|`.
fn u2log(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.25 * u * u
    }
}

/// `-int_a^b log|x - y| dy`.
fn uniform_potential(a: f64, b: f64, x: f64) -> f64 {
    -(ulog(x - a) - ulog(x - b))
}

impl Piece {
    fn validate(&self) -> Result<()> {
        let (a, b) = (self.a, self.b);
        if !(a.is_finite() && b.is_finite() && a < b && a >= -1.0 && b <= 1.0) {
            return Err(Error::invalid(format!("piece [{a}, {b}] is not a sub-interval of [-1, 1]")));
        }
        let in_range = |v: f64| (0.0..=SIGMA_DENSITY + DENSITY_SLACK).contains(&v);
        match &self.density {
            Density::Uniform { value } if !in_range(*value) => Err(Error::invalid(format!(
                "uniform density {value} outside [0, 1/2]"
            ))),
            Density::MuAlpha { alpha } => {
                check_alpha_open(*alpha)?;
                let r = r_of_alpha(*alpha);
                if a < -r - 1e-12 || b > r + 1e-12 {
                    return Err(Error::invalid(format!(
                        "mu_alpha profile piece [{a}, {b}] exceeds [-r, r] = [{}, {r}]",
                        -r
                    )));
                }
                Ok(())
            }
            Density::Table { xs, values } => {
                if xs.len() < 2 || xs.len() != values.len() {
                    return Err(Error::invalid("table needs matching xs and values, length >= 2"));
                }
                if xs[0] != a || xs[xs.len() - 1] != b || xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::invalid("table nodes must increase from a to b"));
                }
                if let Some(v) = values.iter().find(|v| !in_range(**v)) {
                    return Err(Error::invalid(format!("table density {v} outside [0, 1/2]")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn density_at(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            return 0.0;
        }
        match &self.density {
            Density::Uniform { value } => *value,
            Density::TruncatedSigma => SIGMA_DENSITY,
            Density::MuAlpha { alpha } => mu_alpha_density(*alpha, x),
            Density::Table { xs, values } => {
                let k = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let s = (x - x0) / (x1 - x0);
                values[k - 1] + s * (values[k] - values[k - 1])
            }
        }
    }

    /// Mass of `[a, min(x, b)]`.
    pub fn mass_below(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        if x <= a {
            return Ok(0.0);
        }
        let x = x.min(b);
        Ok(match &self.density {
            Density::Uniform { value } => value * (x - a),
            Density::TruncatedSigma => SIGMA_DENSITY * (x - a),
            Density::MuAlpha { alpha } => {
                let r = r_of_alpha(*alpha);
                SIGMA_DENSITY * (x - a) - nu_mass(*alpha, theta_of(a, r), theta_of(x, r))?
            }
            Density::Table { xs, values } => {
                let mut m = 0.0;
                for k in 1..xs.len() {
                    let (x0, x1) = (xs[k - 1], xs[k]);
                    if x0 >= x {
                        break;
                    }
                    let hi = x1.min(x);
                    let v_hi = self.density_at(hi);
                    m += 0.5 * (values[k - 1] + v_hi) * (hi - x0);
                }
                m
            }
        })
    }

    pub fn mass(&self) -> Result<f64> {
        self.mass_below(self.b)
    }

    /// `int log(1 / |x - y|) dmu(y)` over the piece.
    pub fn potential(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        Ok(match &self.density {
            Density::Uniform { value } => value * uniform_potential(a, b, x),
            Density::TruncatedSigma => SIGMA_DENSITY * uniform_potential(a, b, x),
            Density::MuAlpha { alpha } => {
                let r = r_of_alpha(*alpha);
                SIGMA_DENSITY * uniform_potential(a, b, x)
                    - nu_potential(*alpha, theta_of(a, r), theta_of(b, r), x)?
            }
            Density::Table { xs, values } => {
                let mut u = 0.0;
                for k in 1..xs.len() {
                    u += linear_segment_potential(xs[k - 1], xs[k], values[k - 1], values[k], x);
                }
                u
            }
        })
    }

    /// Closed sub-intervals where the density is below `1/2 - threshold`.
    fn deficit(&self, threshold: f64) -> Vec<(f64, f64)> {
        let level = SIGMA_DENSITY - threshold;
        match &self.density {
            Density::Uniform { value } if *value < level => vec![(self.a, self.b)],
            Density::Uniform { .. } | Density::TruncatedSigma => vec![],
            // Below 1/2 on the open interval (-r, r).
            Density::MuAlpha { .. } => vec![(self.a, self.b)],
            Density::Table { xs, values } => {
                let mut out: Vec<(f64, f64)> = Vec::new();
                for k in 1..xs.len() {
                    let (x0, x1, v0, v1) = (xs[k - 1], xs[k], values[k - 1], values[k]);
                    let seg = match (v0 < level, v1 < level) {
                        (true, true) => Some((x0, x1)),
                        (false, false) => None,
                        (true, false) => Some((x0, x0 + (level - v0) / (v1 - v0) * (x1 - x0))),
                        (false, true) => Some((x0 + (level - v0) / (v1 - v0) * (x1 - x0), x1)),
                    };
                    if let Some((lo, hi)) = seg {
                        match out.last_mut() {
                            Some(last) if last.1 >= lo => last.1 = hi,
                            _ => out.push((lo, hi)),
                        }
                    }
                }
                out
            }
        }
    }
}

/// `theta = asin(x / r)`, clamped to `[-pi/2, pi/2]`.
fn theta_of(x: f64, r: f64) -> f64 {
    (x / r).clamp(-1.0, 1.0).asin()
}

/// `1/2 - density` of `mu_alpha` on `(-r, r)` in the variable `theta`:
/// `(1/pi) atan(r cos(theta) / alpha) * r cos(theta)`, smooth on `[-pi/2, pi/2]`.
fn nu_weight(alpha: f64, r: f64, theta: f64) -> f64 {
    let c = r * theta.cos();
    (c / alpha).atan() * c / PI
}

fn nu_mass(alpha: f64, t0: f64, t1: f64) -> Result<f64> {
    if t1 <= t0 {
        return Ok(0.0);
    }
    let r = r_of_alpha(alpha);
    Ok(integrate(|t| nu_weight(alpha, r, t), t0, t1, QUAD_TOL)?.value)
}

/// `int log(1/|x - r sin(theta)|) nu_weight(theta) dtheta` over `[t0, t1]`.
fn nu_potential(alpha: f64, t0: f64, t1: f64, x: f64) -> Result<f64> {
    if t1 <= t0 {
        return Ok(0.0);
    }
    let r = r_of_alpha(alpha);
    let w = |t: f64| nu_weight(alpha, r, t);
    let tol = Tolerance::new(1e-13, 1e-13);
    if x.abs() > 2.0 {
        // log|x - r sin t| = log|x| + log(1 - r sin(t) / x)
        let far = integrate(|t| -(-r * t.sin() / x).ln_1p() * w(t), t0, t1, tol)?.value;
        return Ok(far - x.abs().ln() * nu_mass(alpha, t0, t1)?);
    }
    if x.abs() < r {
        // x - r sin(t) = 2 r cos((tx + t)/2) sin((tx - t)/2)
        let tx = (x / r).asin();
        let log_diff = |t: f64, d: f64| {
            (2.0 * r).ln() + (0.5 * (tx + t)).cos().abs().ln() + (0.5 * d).sin().abs().ln()
        };
        let mut total = 0.0;
        if tx > t0 {
            let hi = tx.min(t1);
            let sing = if tx <= t1 { Singular::Right } else { Singular::None };
            total += integrate_singular(
                |t, d| {
                    let d = if d.is_nan() { tx - t } else { d };
                    -log_diff(t, d) * w(t)
                },
                t0,
                hi,
                sing,
                tol,
            )?
            .value;
        }
        if tx < t1 {
            let lo = tx.max(t0);
            let sing = if tx >= t0 { Singular::Left } else { Singular::None };
            total += integrate_singular(
                |t, d| {
                    let d = if d.is_nan() { t - tx } else { d };
                    -log_diff(t, d) * w(t)
                },
                lo,
                t1,
                sing,
                tol,
            )?
            .value;
        }
        Ok(total)
    } else {
        // |x - r sin t| = (|x| - r) + 2 r sin^2(pi/4 - sign(x) t / 2)
        let s = x.signum();
        let gap = x.abs() - r;
        let f = move |t: f64, _d: f64| {
            let q = (FRAC_PI_4 - 0.5 * s * t).sin();
            -(gap + 2.0 * r * q * q).ln() * w(t)
        };
        let sing = if gap == 0.0 {
            if s > 0.0 && t1 == FRAC_PI_2 {
                Singular::Right
            } else if s < 0.0 && t0 == -FRAC_PI_2 {
                Singular::Left
            } else {
                Singular::None
            }
        } else {
            Singular::None
        };
        let mut pts = vec![t0, t1];
        if gap > 0.0 && gap < 0.1 {
            // Resolve the near-singular end.
            let edge = if s > 0.0 { t1 } else { t0 };
            for k in 1..6 {
                let p = edge - s * (t1 - t0) * 0.1f64.powi(k);
                if p > t0 && p < t1 {
                    pts.push(p);
                }
            }
            pts.sort_by(|a, b| a.total_cmp(b));
        }
        if sing == Singular::None {
            Ok(crate::quadrature::integrate_points(|t| f(t, f64::NAN), &pts, tol)?.value)
        } else {
            Ok(integrate_singular(f, t0, t1, sing, tol)?.value)
        }
    }
}

/// `-int_{x0}^{x1} log|x - y| rho(y) dy` for linear `rho` from `v0` to `v1`.
fn linear_segment_potential(x0: f64, x1: f64, v0: f64, v1: f64, x: f64) -> f64 {
    // rho(y) = mean + slope (y - c); with u = x - y, y - c = (x - c) - u.
    let c = 0.5 * (x0 + x1);
    let mean = 0.5 * (v0 + v1);
    let slope = (v1 - v0) / (x1 - x0);
    let (u0, u1) = (x - x0, x - x1);
    let k0 = ulog(u0) - ulog(u1);
    let k1 = u2log(u0) - u2log(u1);
    -(mean * k0 + slope * ((x - c) * k0 - k1))
}

/// Density of `mu_alpha`: `1/2` on `|x| >= r`, `(1/pi) atan(alpha / sqrt(r^2 - x^2))` inside.
pub fn mu_alpha_density(alpha: f64, x: f64) -> f64 {
    let r = r_of_alpha(alpha);
    if x.abs() >= r {
        return SIGMA_DENSITY;
    }
    (alpha / ((r - x) * (r + x)).sqrt()).atan() / PI
}

/// The same density written as `1/2 - (1/pi) arccos(alpha / sqrt(1 - x^2))`.
pub fn mu_alpha_density_arccos(alpha: f64, x: f64) -> f64 {
    let r = r_of_alpha(alpha);
    if x.abs() >= r {
        return SIGMA_DENSITY;
    }
    let arg = (alpha / ((1.0 - x) * (1.0 + x)).sqrt()).min(1.0);
    SIGMA_DENSITY - arg.acos() / PI
}

impl PiecewiseMeasure {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("a measure needs at least one piece"));
        }
        for p in &pieces {
            p.validate()?;
        }
        if pieces.windows(2).any(|w| w[0].b > w[1].a) {
            return Err(Error::invalid("pieces must be sorted and non-overlapping"));
        }
        let mut total_mass = 0.0;
        for p in &pieces {
            total_mass += p.mass()?;
        }
        Ok(PiecewiseMeasure { pieces, total_mass })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn density(&self, x: f64) -> f64 {
        // At a shared endpoint the left piece wins.
        self.pieces
            .iter()
            .find(|p| x >= p.a && x <= p.b)
            .map_or(0.0, |p| p.density_at(x))
    }

    /// Ends of the pieces and of the gaps between them, covering `[-1, 1]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![-1.0];
        for p in &self.pieces {
            pts.push(p.a);
            pts.push(p.b);
        }
        pts.push(1.0);
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }

    /// `supp(sigma - mu)`: closure of `{density < 1/2 - threshold}` as
    /// disjoint closed intervals. Gaps between pieces carry density zero.
    pub fn unsaturated_support(&self, threshold: f64) -> Vec<(f64, f64)> {
        let mut parts: Vec<(f64, f64)> = Vec::new();
        let mut cursor = -1.0;
        for p in &self.pieces {
            if p.a > cursor {
                parts.push((cursor, p.a));
            }
            parts.extend(p.deficit(threshold));
            cursor = p.b;
        }
        if cursor < 1.0 {
            parts.push((cursor, 1.0));
        }
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some(last) if last.1 >= lo => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        merged
    }
}

/// `mu([-1, x])`.
pub fn cdf(m: &PiecewiseMeasure, x: f64) -> Result<f64> {
    let mut total = 0.0;
    for p in &m.pieces {
        if p.a >= x {
            break;
        }
        total += p.mass_below(x)?;
    }
    Ok(total)
}

/// Logarithmic potential `U^mu(x) = int log(1/|x - y|) dmu(y)`.
pub fn potential(m: &PiecewiseMeasure, x: f64) -> Result<f64> {
    let mut u = 0.0;
    for p in &m.pieces {
        u += p.potential(x)?;
    }
    Ok(u)
}

/// `mu_alpha` with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaMeasure {
    pub alpha: f64,
    pub r: f64,
    pub measure: PiecewiseMeasure,
}

impl AlphaMeasure {
    pub fn density(&self, x: f64) -> f64 {
        mu_alpha_density(self.alpha, x)
    }

    pub fn density_arccos(&self, x: f64) -> f64 {
        mu_alpha_density_arccos(self.alpha, x)
    }
}

/// The constrained equilibrium measure `mu_alpha`; fails if its computed
/// mass differs from `alpha` by more than `1e-10`.
pub fn mu_alpha(alpha: f64) -> Result<AlphaMeasure> {
    check_alpha_open(alpha)?;
    let r = r_of_alpha(alpha);
    let measure = PiecewiseMeasure::new(vec![
        Piece { a: -1.0, b: -r, density: Density::TruncatedSigma },
        Piece { a: -r, b: r, density: Density::MuAlpha { alpha } },
        Piece { a: r, b: 1.0, density: Density::TruncatedSigma },
    ])?;
    if (measure.total_mass() - alpha).abs() > MASS_TOL {
        return Err(Error::numeric(format!(
            "mass of mu_alpha is {:.17e}, expected {alpha}",
            measure.total_mass()
        )));
    }
    Ok(AlphaMeasure { alpha, r, measure })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> PiecewiseMeasure {
        PiecewiseMeasure::new(vec![Piece { a: -1.0, b: 1.0, density: Density::TruncatedSigma }]).unwrap()
    }

    #[test]
    fn mu_alpha_point_values() {
        let m = mu_alpha(0.6).unwrap();
        assert!((m.r - 0.8).abs() < 1e-15);
        assert!((m.density(0.0) - 0.75f64.atan() / PI).abs() < 1e-15);
        assert!((m.density(0.0) - 0.204_832_8).abs() < 1e-7);
        assert_eq!(m.density(0.9), 0.5);
        assert_eq!(m.density(-0.9), 0.5);
        assert!((m.measure.total_mass() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn cdf_values() {
        assert!((cdf(&sigma(), 0.0).unwrap() - 0.5).abs() < 1e-15);
        let m = mu_alpha(0.6).unwrap().measure;
        assert_eq!(cdf(&m, -1.0).unwrap(), 0.0);
        assert!((cdf(&m, 1.0).unwrap() - 0.6).abs() < 1e-12);
        assert!((cdf(&m, -0.8).unwrap() - 0.1).abs() < 1e-15);
        assert!((cdf(&m, 0.0).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn sigma_potential() {
        assert!((potential(&sigma(), 0.0).unwrap() - 1.0).abs() < 1e-15);
        // U^sigma(1) = 1 - log 2
        assert!((potential(&sigma(), 1.0).unwrap() - (1.0 - std::f64::consts::LN_2)).abs() < 1e-15);
    }

    #[test]
    fn far_field() {
        let m = mu_alpha(0.5).unwrap().measure;
        let x = 1e6;
        assert!((potential(&m, x).unwrap() + 0.5 * x.ln()).abs() < 1e-5);
    }

    #[test]
    fn variational_constant_on_support() {
        let m = mu_alpha(0.5).unwrap();
        let vals: Vec<f64> = (0..50)
            .map(|i| potential(&m.measure, -m.r + 2.0 * m.r * i as f64 / 49.0).unwrap())
            .collect();
        let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6, "{spread:e}");
    }

    #[test]
    fn table_matches_uniform() {
        let xs: Vec<f64> = (0..=10).map(|k| -0.5 + 0.1 * k as f64).collect();
        let t = PiecewiseMeasure::new(vec![Piece {
            a: -0.5,
            b: 0.5,
            density: Density::Table { values: vec![0.3; 11], xs },
        }])
        .unwrap();
        let u = PiecewiseMeasure::new(vec![Piece { a: -0.5, b: 0.5, density: Density::Uniform { value: 0.3 } }]).unwrap();
        for x in [-2.0, -0.5, -0.13, 0.0, 0.31, 0.5, 0.9, 40.0] {
            assert!((potential(&t, x).unwrap() - potential(&u, x).unwrap()).abs() < 1e-13, "{x}");
        }
        assert!((t.total_mass() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn linear_table_potential_against_quadrature() {
        let rho = |y: f64| 0.2 + 0.25 * (y - 0.1) / 0.3;
        for x in [0.25f64, 0.1, 0.4, 0.5, 0.7, 3.0] {
            let q = if x > 0.1 && x < 0.4 {
                integrate_singular(|y, d| -d.ln() * rho(y), 0.1, x, Singular::Right, QUAD_TOL).unwrap().value
                    + integrate_singular(|y, d| -d.ln() * rho(y), x, 0.4, Singular::Left, QUAD_TOL).unwrap().value
            } else if x == 0.1 {
                integrate_singular(|y, d| -d.ln() * rho(y), 0.1, 0.4, Singular::Left, QUAD_TOL).unwrap().value
            } else if x == 0.4 {
                integrate_singular(|y, d| -d.ln() * rho(y), 0.1, 0.4, Singular::Right, QUAD_TOL).unwrap().value
            } else {
                integrate(|y| -(x - y).abs().ln() * rho(y), 0.1, 0.4, QUAD_TOL).unwrap().value
            };
            let seg = linear_segment_potential(0.1, 0.4, 0.2, 0.45, x);
            assert!((seg - q).abs() < 1e-12, "{x}: {seg} vs {q}");
        }
    }

    #[test]
    fn unsaturated_support_sets() {
        let m = mu_alpha(0.6).unwrap().measure;
        assert_eq!(m.unsaturated_support(1e-9), vec![(-0.8, 0.8)]);
        let trunc = PiecewiseMeasure::new(vec![Piece { a: -0.3, b: 0.3, density: Density::TruncatedSigma }]).unwrap();
        assert_eq!(trunc.unsaturated_support(1e-9), vec![(-1.0, -0.3), (0.3, 1.0)]);
        assert_eq!(sigma().unsaturated_support(1e-9), vec![]);
    }

    #[test]
    fn rejects_bad_measures() {
        let too_dense = vec![Piece { a: -1.0, b: 1.0, density: Density::Uniform { value: 0.6 } }];
        assert!(PiecewiseMeasure::new(too_dense).is_err());
        let overlap = vec![
            Piece { a: -1.0, b: 0.2, density: Density::TruncatedSigma },
            Piece { a: 0.1, b: 1.0, density: Density::TruncatedSigma },
        ];
        assert!(PiecewiseMeasure::new(overlap).is_err());
        assert!(mu_alpha(1.0).is_err());
        assert!(r#"{"pieces":[{"a":-1,"b":1,"density":{"kind":"uniform","value":0.2,"extra":1}}]}"#
            .parse::<serde_json::Value>()
            .ok()
            .and_then(|v| serde_json::from_value::<PiecewiseMeasure>(v).ok())
            .is_none());
    }

    #[test]
    fn json_round_trip() {
        let m = mu_alpha(0.4).unwrap().measure;
        let s = crate::json::to_string(&m).unwrap();
        assert!(s.contains(r#""kind":"mu_alpha""#));
        assert!(s.contains(r#""kind":"truncated_sigma""#));
        let back: PiecewiseMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
