//! Finite-`n` sweeps compared with the growth constant `C(alpha)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::HarnessConfig;
use crate::equilibrium::{c_closed, cdf, mu_alpha, AlphaMeasure};
use crate::grid_poly::{roots_in_window_with_spacing, Grid};
use crate::minmax::solve_monic_min;
use crate::ratio_extremal::{
    degree_budget, solve_ratio_extremal_with, zero_counting_measure, ZeroCountingMeasure,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Ratio,
    Monic,
    Both,
}

impl Route {
    fn ratio(self) -> bool {
        matches!(self, Route::Ratio | Route::Both)
    }

    fn monic(self) -> bool {
        matches!(self, Route::Monic | Route::Both)
    }
}

/// Which polynomial supplies the zeros for [`zero_distribution_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Ratio,
    Monic,
}

/// `(1/n) log(sup |P| / grid max |P|)` for the monic minimizer `P` of degree `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicRoute {
    pub n: usize,
    pub d: usize,
    pub value: f64,
    /// `log sup |P| - log |leading|` on `[-1, 1]`.
    pub log_sup: f64,
    pub argmax: f64,
    /// `log max |P(xi_k)| - log |leading|`.
    pub log_grid: f64,
    pub zeros: Vec<f64>,
    pub max_zeros_per_gap: usize,
}

fn log_abs_monic(zeros: &[f64], x: f64) -> f64 {
    zeros.iter().map(|z| (x - z).abs().ln()).sum()
}

/// Maximum of a concave function on `[a, b]` (golden section).
fn concave_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-13 * (1.0 + a.abs().max(b.abs())) {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Evaluates the monic route for `(n, d)` in the log domain from the zeros of
/// the monic minimizer. Fails unless all `d` zeros lie in `(-1, 1)`, one per
/// grid gap at most.
pub fn monic_route(n: usize, d: usize) -> Result<MonicRoute> {
    let g = Grid::new(n)?;
    let sol = solve_monic_min(&g, d)?;
    let zs = roots_in_window_with_spacing(&sol.poly, -1.0, 1.0, g.spacing())?;
    let zeros = zs.zeros;
    if zeros.len() != d {
        return Err(Error::numeric(format!(
            "monic minimizer of degree {d} has {} zeros in [-1, 1]",
            zeros.len()
        )));
    }
    let mut per_gap = vec![0usize; g.gap_count()];
    for &z in &zeros {
        if let Some(k) = g.gap_containing(z) {
            if g.grid_index(z, 0.0).is_none() {
                per_gap[k] += 1;
            }
        }
    }
    let max_zeros_per_gap = per_gap.iter().copied().max().unwrap_or(0);
    if max_zeros_per_gap > 1 {
        return Err(Error::numeric(format!(
            "monic minimizer zeros are not separated by the grid ({max_zeros_per_gap} in one gap)"
        )));
    }

    // log |P| is concave between consecutive zeros.
    let f = |x: f64| log_abs_monic(&zeros, x);
    let mut bounds = vec![-1.0];
    bounds.extend(zeros.iter().copied());
    bounds.push(1.0);
    let (mut argmax, mut log_sup) = (-1.0, f(-1.0));
    if f(1.0) > log_sup {
        (argmax, log_sup) = (1.0, f(1.0));
    }
    for w in bounds.windows(2) {
        if w[1] > w[0] {
            let (x, v) = concave_max(f, w[0], w[1]);
            if v > log_sup {
                (argmax, log_sup) = (x, v);
            }
        }
    }
    let log_grid = g.points().iter().map(|&x| f(x)).fold(f64::NEG_INFINITY, f64::max);
    Ok(MonicRoute {
        n,
        d,
        value: (log_sup - log_grid) / n as f64,
        log_sup,
        argmax,
        log_grid,
        zeros,
        max_zeros_per_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub ratio: Option<f64>,
    pub log_ratio_over_n: Option<f64>,
    pub monic_route_value: Option<f64>,
    /// Kolmogorov distance of the zero counting measure to `mu_alpha`
    /// (monic zeros when computed, else ratio zeros).
    pub ks_distance: Option<f64>,
}

/// Least-squares fit `a + b/n` with its comparison to the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub rel_error: f64,
    /// `C + (g log n + c)/n` through the three largest `n`, for comparison.
    pub log_corrected: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub alpha: f64,
    pub route: Route,
    pub rows: Vec<SweepRow>,
    /// Extrapolation of the ratio route, or of the monic route if only that ran.
    pub extrapolated: f64,
    pub target: f64,
    pub rel_error: f64,
    pub ratio_fit: Option<Extrapolation>,
    pub monic_fit: Option<Extrapolation>,
    /// Whether the ratio-route values increase with `n` (reported only).
    pub monotone: Option<bool>,
}

/// Fits `a + b/n` to the three largest `n` (fewer if fewer are given).
pub fn fit_inverse_n(points: &[(usize, f64)], target: f64) -> Result<Extrapolation> {
    if points.is_empty() {
        return Err(Error::invalid("no points to fit"));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let pts = &pts[pts.len().saturating_sub(3)..];
    let m = pts.len() as f64;
    let (a, b) = if pts.len() == 1 {
        (pts[0].1, 0.0)
    } else {
        let xs: Vec<f64> = pts.iter().map(|p| 1.0 / p.0 as f64).collect();
        let mx = xs.iter().sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
        let b = sxy / sxx;
        (my - b * mx, b)
    };
    let residual = (pts
        .iter()
        .map(|p| (p.1 - a - b / p.0 as f64).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let log_corrected = if pts.len() == 3 {
        log_corrected_fit(pts)
    } else {
        None
    };
    Ok(Extrapolation {
        a,
        b,
        residual,
        rel_error: (a - target) / target,
        log_corrected,
        points: pts.len(),
    })
}

/// Solves `y = C + (g log n + c)/n` through three points.
fn log_corrected_fit(pts: &[(usize, f64)]) -> Option<f64> {
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (i, &(n, y)) in pts.iter().enumerate() {
        let n = n as f64;
        m[i] = [1.0, n.ln() / n, 1.0 / n];
        rhs[i] = y;
    }
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut m0 = m;
    for i in 0..3 {
        m0[i][0] = rhs[i];
    }
    Some(det(&m0) / d)
}

/// Kolmogorov distance between a zero counting measure and `mu_alpha`.
///
/// Both are compared on `[-1, 1]`; between jumps the gap is monotone, so the
/// jumps and the endpoints suffice.
pub fn ks_distance(counting: &ZeroCountingMeasure, mu: &AlphaMeasure) -> Result<f64> {
    let mut dist = (counting.cdf(1.0) - mu.alpha).abs();
    for &z in &counting.zeros {
        let f = cdf(&mu.measure, z)?;
        dist = dist.max((counting.cdf(z) - f).abs()).max((counting.cdf_left(z) - f).abs());
    }
    Ok(dist)
}

/// Empirical mass of `[r, 1]`.
pub fn saturated_mass(counting: &ZeroCountingMeasure, r: f64) -> f64 {
    counting.mass - counting.cdf_left(r)
}

/// Zeros of the chosen extremal polynomial, as a counting measure.
pub fn zero_measure(n: usize, alpha: f64, source: ZeroSource, cfg: &HarnessConfig) -> Result<ZeroCountingMeasure> {
    check_alpha(alpha)?;
    let d = degree_budget(n, alpha);
    Ok(match source {
        ZeroSource::Ratio => zero_counting_measure(&solve_ratio_extremal_with(n, d, alpha, cfg.ratio_options())?),
        ZeroSource::Monic => ZeroCountingMeasure::from_zeros(&monic_route(n, d)?.zeros, n),
    })
}

/// Kolmogorov distance between the zero counting measure (mass
/// `floor(alpha n)/n`) and `mu_alpha`.
pub fn zero_distribution_distance(n: usize, alpha: f64, source: ZeroSource) -> Result<f64> {
    let m = zero_measure(n, alpha, source, &HarnessConfig::default())?;
    ks_distance(&m, &mu_alpha(alpha)?)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn sweep_row(n: usize, alpha: f64, route: Route, mu: &AlphaMeasure, cfg: &HarnessConfig) -> Result<SweepRow> {
    let d = degree_budget(n, alpha);
    let ratio_sol = if route.ratio() {
        Some(solve_ratio_extremal_with(n, d, alpha, cfg.ratio_options())?)
    } else {
        None
    };
    let monic = if route.monic() {
        if d == 0 {
            return Err(Error::invalid(format!("floor(alpha n) = 0 for n = {n}")));
        }
        Some(monic_route(n, d)?)
    } else {
        None
    };
    let counting = match (&monic, &ratio_sol) {
        (Some(m), _) => ZeroCountingMeasure::from_zeros(&m.zeros, n),
        (None, Some(s)) => zero_counting_measure(s),
        (None, None) => unreachable!("a route is always selected"),
    };
    Ok(SweepRow {
        n,
        d,
        ratio: ratio_sol.as_ref().map(|s| s.ratio),
        log_ratio_over_n: ratio_sol.as_ref().map(|s| s.log_ratio_over_n),
        monic_route_value: monic.map(|m| m.value),
        ks_distance: Some(ks_distance(&counting, mu)?),
    })
}

/// Runs the chosen routes for every `n` (concurrently, merged in order of `n`)
/// and extrapolates `a + b/n`.
pub fn sweep(alpha: f64, n_list: &[usize], route: Route, cfg: &HarnessConfig) -> Result<SweepReport> {
    check_alpha(alpha)?;
    if n_list.is_empty() {
        return Err(Error::invalid("empty n list"));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let target = c_closed(alpha)?;
    let mu = mu_alpha(alpha)?;
    let rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&n| sweep_row(n, alpha, route, &mu, cfg))
        .collect::<Result<_>>()?;
    let ratio_fit = if route.ratio() {
        let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.log_ratio_over_n.unwrap_or(f64::NAN))).collect();
        Some(fit_inverse_n(&pts, target)?)
    } else {
        None
    };
    let monic_fit = if route.monic() {
        let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.monic_route_value.unwrap_or(f64::NAN))).collect();
        Some(fit_inverse_n(&pts, target)?)
    } else {
        None
    };
    let primary = ratio_fit.as_ref().or(monic_fit.as_ref()).expect("a route is always selected");
    let monotone = ratio_fit.as_ref().map(|_| {
        rows.windows(2)
            .all(|w| w[1].log_ratio_over_n.unwrap_or(0.0) >= w[0].log_ratio_over_n.unwrap_or(0.0))
    });
    Ok(SweepReport {
        alpha,
        route,
        extrapolated: primary.a,
        target,
        rel_error: primary.rel_error,
        rows,
        ratio_fit,
        monic_fit,
        monotone,
    })
}

/// [`sweep`] over the ratio route with default configuration.
pub fn sweep_ratio(alpha: f64, n_list: &[usize]) -> Result<SweepReport> {
    sweep(alpha, n_list, Route::Ratio, &HarnessConfig::default())
}

/// [`sweep`] over the monic route with default configuration.
pub fn sweep_monic(alpha: f64, n_list: &[usize]) -> Result<SweepReport> {
    sweep(alpha, n_list, Route::Monic, &HarnessConfig::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrRow {
    pub n: usize,
    pub d: usize,
    pub ratio: f64,
    /// `n log(ratio) / d^2`.
    pub exponent_estimate: f64,
}

/// Ratios for `d = round(c sqrt n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    pub c: f64,
    pub rows: Vec<CrRow>,
    pub band_min: f64,
    pub band_max: f64,
}

pub fn cr_regime(c: f64, n_list: &[usize], cfg: &HarnessConfig) -> Result<CrReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    if n_list.is_empty() {
        return Err(Error::invalid("empty n list"));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let rows: Vec<CrRow> = ns
        .par_iter()
        .map(|&n| {
            let d = (c * (n as f64).sqrt()).round() as usize;
            if d == 0 {
                return Err(Error::invalid(format!("round(c sqrt n) = 0 for n = {n}")));
            }
            let s = solve_ratio_extremal_with(n, d, d as f64 / n as f64, cfg.ratio_options())?;
            Ok(CrRow {
                n,
                d,
                ratio: s.ratio,
                exponent_estimate: n as f64 * s.ratio.ln() / (d * d) as f64,
            })
        })
        .collect::<Result<_>>()?;
    let band_min = rows.iter().map(|r| r.exponent_estimate).fold(f64::INFINITY, f64::min);
    let band_max = rows.iter().map(|r| r.exponent_estimate).fold(f64::NEG_INFINITY, f64::max);
    Ok(CrReport { c, rows, band_min, band_max })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.16e}"))
}

/// One row per `n`: `n,d,ratio,log_ratio_over_n,monic_route_value,ks_distance`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("n,d,ratio,log_ratio_over_n,monic_route_value,ks_distance\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.d,
            fmt_opt(r.ratio),
            fmt_opt(r.log_ratio_over_n),
            fmt_opt(r.monic_route_value),
            fmt_opt(r.ks_distance)
        ));
    }
    out
}

/// `(1/n, value)` pairs per route plus the target line.
pub fn plot_data_csv(report: &SweepReport) -> String {
    let mut out = String::from("series,inv_n,value\n");
    for r in &report.rows {
        let x = 1.0 / r.n as f64;
        if let Some(v) = r.log_ratio_over_n {
            out.push_str(&format!("ratio,{x:.16e},{v:.16e}\n"));
        }
        if let Some(v) = r.monic_route_value {
            out.push_str(&format!("monic,{x:.16e},{v:.16e}\n"));
        }
    }
    out.push_str(&format!("target,0,{:.16e}\n", report.target));
    out
}

pub fn cr_csv(report: &CrReport) -> String {
    let mut out = String::from("n,d,ratio,exponent_estimate\n");
    for r in &report.rows {
        out.push_str(&format!("{},{},{:.16e},{:.16e}\n", r.n, r.d, r.ratio, r.exponent_estimate));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_line() {
        let pts = [(10, 1.0 + 2.0 / 10.0), (20, 1.0 + 2.0 / 20.0), (40, 1.0 + 2.0 / 40.0)];
        let f = fit_inverse_n(&pts, 1.0).unwrap();
        assert!((f.a - 1.0).abs() < 1e-12 && (f.b - 2.0).abs() < 1e-10);
        assert!(f.residual < 1e-14 && f.rel_error.abs() < 1e-12);
    }

    #[test]
    fn fit_single_point() {
        let f = fit_inverse_n(&[(40, 0.07)], 0.13).unwrap();
        assert_eq!((f.a, f.b, f.points), (0.07, 0.0, 1));
        assert!((f.rel_error - (0.07 - 0.13) / 0.13).abs() < 1e-15);
    }

    #[test]
    fn fit_uses_largest_three() {
        let pts = [(5, 100.0), (10, 1.2), (20, 1.1), (40, 1.05)];
        let f = fit_inverse_n(&pts, 1.0).unwrap();
        assert!((f.a - 1.0).abs() < 1e-12);
        assert_eq!(f.points, 3);
    }

    #[test]
    fn log_corrected_recovers_model() {
        let y = |n: f64| 0.13 + (-1.3 * n.ln() + 2.2) / n;
        let pts = [(40, y(40.0)), (80, y(80.0)), (160, y(160.0))];
        assert!((log_corrected_fit(&pts).unwrap() - 0.13).abs() < 1e-10);
    }

    #[test]
    fn concave_max_interior_and_endpoint() {
        let (x, v) = concave_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && v.abs() < 1e-13);
        let (x, _) = concave_max(|x| x, -1.0, 1.0);
        assert!(x > 1.0 - 1e-10);
    }

    #[test]
    fn monic_route_small() {
        // n = 3, d = 2: P = x^2 - 1/2, sup 1/2, grid max 1/2.
        let m = monic_route(3, 2).unwrap();
        assert!(m.value.abs() < 1e-12);
        let m = monic_route(40, 20).unwrap();
        assert_eq!(m.zeros.len(), 20);
        assert_eq!(m.max_zeros_per_gap, 1);
        assert!(m.value > 0.0);
    }

    #[test]
    fn ks_of_exact_measure_is_small() {
        let mu = mu_alpha(0.5).unwrap();
        // Quantiles of mu_alpha at (k - 1/2)/n.
        let n = 400;
        let d = 200;
        let mut zeros = Vec::new();
        for k in 1..=d {
            let target = (k as f64 - 0.5) / n as f64;
            let (mut lo, mut hi) = (-1.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if cdf(&mu.measure, mid).unwrap() < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        let m = ZeroCountingMeasure::from_zeros(&zeros, n);
        let ks = ks_distance(&m, &mu).unwrap();
        assert!((ks - 0.5 / n as f64).abs() < 1e-9, "{ks}");
        assert!((saturated_mass(&m, mu.r) - 0.5 * (1.0 - mu.r)).abs() < 1.0 / n as f64);
    }

    #[test]
    fn sweep_single_n() {
        let r = sweep(0.5, &[40], Route::Both, &HarnessConfig::default()).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.d, 20);
        assert!(row.monic_route_value.unwrap() <= row.log_ratio_over_n.unwrap() + 1e-12);
        assert_eq!(r.extrapolated, row.log_ratio_over_n.unwrap());
        assert!((r.rel_error - (r.extrapolated - r.target) / r.target).abs() < 1e-15);
        let csv = sweep_csv(&r);
        assert!(csv.starts_with("n,d,ratio,log_ratio_over_n,monic_route_value,ks_distance\n40,20,"));
        assert!(plot_data_csv(&r).contains("target,0,"));
    }

    #[test]
    fn invalid_sweeps() {
        assert!(sweep(0.5, &[], Route::Ratio, &HarnessConfig::default()).is_err());
        assert!(sweep(1.0, &[40], Route::Ratio, &HarnessConfig::default()).is_err());
        assert!(cr_regime(1.0, &[], &HarnessConfig::default()).is_err());
    }

    #[test]
    fn cr_exponents_positive() {
        let r = cr_regime(1.0, &[25, 49], &HarnessConfig::default()).unwrap();
        assert_eq!(r.rows[0].d, 5);
        assert_eq!(r.rows[1].d, 7);
        for row in &r.rows {
            assert!(row.exponent_estimate > 0.0 && row.exponent_estimate.is_finite());
        }
    }
}
