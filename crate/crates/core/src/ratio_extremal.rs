//! The polynomial of degree at most `d` that is largest somewhere in
//! `[-1, 1]` while bounded by one on the grid.
//!
//! `phi(x*)` is the pinned maximum `max p(x*)` over `|p| <= 1` on the grid.
//! The extremal ratio is `max phi` over `[-1, 1]`, found by scanning the
//! gaps of `[-1, 0]` (`phi` is even) and refining the best by golden section.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid_poly::{grid_norm, roots_in_window_with_spacing, spectrum, ChebPoly, Grid, ZeroSet};
use crate::minmax::{check_pinned_args, ChebTable, MinMaxSolution, PinnedSolver};
use crate::{Error, Result};

/// Window searched for the one zero that may lie outside `[-1, 1]`.
pub const OUTSIDE_WINDOW: f64 = 10.0;
const CACHE_LIMIT: usize = 32;
const TIE_REL: f64 = 1e-9;
const GAPS_PER_CHUNK: usize = 16;

/// `floor(alpha n)`, robust to `alpha n` landing one ulp below an integer.
pub fn degree_budget(n: usize, alpha: f64) -> usize {
    let t = alpha * n as f64;
    (t * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

fn solver_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<PinnedSolver>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<PinnedSolver>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_solver(g: &Grid, d: usize) -> Arc<PinnedSolver> {
    let key = (g.n(), d);
    let mut cache = solver_cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(s) = cache.get(&key) {
        return s.clone();
    }
    if cache.len() >= CACHE_LIMIT {
        cache.clear();
    }
    let s = Arc::new(PinnedSolver::new(ChebTable::shared(g.points(), d)));
    cache.insert(key, s.clone());
    s
}

/// `phi_d(x*) = max p(x*)` over degree `<= d` with `|p| <= 1` on the grid.
///
/// Equals one at grid points. Solvers are cached per `(n, d)`.
pub fn phi(g: &Grid, d: usize, x_star: f64) -> Result<f64> {
    if g.grid_index(x_star, 0.0).is_some() && d < g.n() {
        return Ok(1.0);
    }
    check_pinned_args(g, d, x_star)?;
    Ok(cached_solver(g, d).solve(x_star, 1.0, None)?.objective)
}

/// Scan and refinement parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioOptions {
    /// Chebyshev-spaced samples per grid gap.
    pub points_per_gap: usize,
    /// Gaps refined by golden section after the scan.
    pub refine_gaps: usize,
    /// Final bracket width.
    pub refine_tol: f64,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions {
            points_per_gap: 8,
            refine_gaps: 3,
            refine_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSolution {
    pub n: usize,
    pub alpha: f64,
    pub degree_budget: usize,
    /// Scaled to grid norm one.
    pub poly: ChebPoly,
    pub x_star: f64,
    /// `max |p|` on `[-1, 1]` over `max |p|` on the grid, attained at `x_star`.
    pub ratio: f64,
    pub log_ratio_over_n: f64,
    /// Real zeros in `[-10, 10]`.
    pub zeros: ZeroSet,
    /// The zero outside `[-1, 1]`, if there is one in the window.
    pub outside_zero: Option<f64>,
}

/// One pinned solve inside the scan.
#[derive(Debug, Clone)]
struct Probe {
    x: f64,
    value: f64,
    basis: Vec<usize>,
}

struct Scanner {
    solver: Arc<PinnedSolver>,
}

impl Scanner {
    fn probe(&self, x: f64, start: Option<&[usize]>) -> Result<Probe> {
        let s: MinMaxSolution = self.solver.solve(x, 1.0, start)?;
        Ok(Probe {
            x,
            value: s.objective,
            basis: s.basis_nodes,
        })
    }

    /// Samples of one gap, warm-started along the chain.
    fn scan_gap(&self, lo: f64, hi: f64, m: usize, start: &mut Option<Vec<usize>>) -> Result<Vec<Probe>> {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut out = Vec::with_capacity(m);
        for j in (0..m).rev() {
            let t = (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * m) as f64).cos();
            let p = self.probe(c + h * t, start.as_deref())?;
            *start = Some(p.basis.clone());
            out.push(p);
        }
        Ok(out)
    }

    /// Golden-section maximization of `phi` on `[lo, hi]`.
    fn refine(&self, mut lo: f64, mut hi: f64, seed: &Probe, tol: f64) -> Result<Probe> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut best = seed.clone();
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut p1 = self.probe(x1, Some(&seed.basis))?;
        let mut p2 = self.probe(x2, Some(&p1.basis))?;
        let mut guard = 0;
        while hi - lo > tol {
            guard += 1;
            if guard > 200 {
                return Err(Error::numeric(format!("golden section stalled on [{lo}, {hi}]")));
            }
            if p1.value >= p2.value {
                hi = x2;
                x2 = x1;
                p2 = p1;
                x1 = hi - g * (hi - lo);
                p1 = self.probe(x1, Some(&p2.basis))?;
            } else {
                lo = x1;
                x1 = x2;
                p1 = p2;
                x2 = lo + g * (hi - lo);
                p2 = self.probe(x2, Some(&p1.basis))?;
            }
        }
        for p in [p1, p2] {
            if p.value > best.value {
                best = p;
            }
        }
        Ok(best)
    }
}

/// Extremal polynomial for `d = floor(alpha n)` with default options.
pub fn solve_ratio_extremal(n: usize, alpha: f64) -> Result<ExtremalSolution> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    solve_ratio_extremal_with(n, degree_budget(n, alpha), alpha, RatioOptions::default())
}

/// Extremal polynomial for an explicit degree budget `d`; `alpha` is only
/// recorded in the result.
pub fn solve_ratio_extremal_with(n: usize, d: usize, alpha: f64, opts: RatioOptions) -> Result<ExtremalSolution> {
    if n < 3 {
        return Err(Error::invalid(format!("n must be at least 3, got {n}")));
    }
    if d == 0 {
        return Err(Error::invalid("degree budget floor(alpha n) must be at least 1"));
    }
    if d >= n {
        return Err(Error::DegenerateProblem(format!(
            "degree budget {d} >= n = {n}: the ratio is unbounded"
        )));
    }
    if opts.points_per_gap < 1 || !(opts.refine_tol > 0.0) {
        return Err(Error::invalid("points_per_gap must be >= 1 and refine_tol > 0"));
    }
    let g = Grid::new(n)?;
    let scanner = Scanner {
        solver: cached_solver(&g, d),
    };

    // phi(-x) = phi(x) on the symmetric grid and ties go to the smallest x*,
    // so the gaps up to the centre suffice.
    let gaps: Vec<usize> = (0..g.gap_count())
        .filter(|&k| {
            let (a, b) = g.gap(k);
            a + b <= 0.0
        })
        .collect();
    let m = opts.points_per_gap;
    let scanned: Vec<Result<Vec<(usize, Vec<Probe>)>>> = gaps
        .par_chunks(GAPS_PER_CHUNK)
        .map(|chunk| {
            let mut start = None;
            chunk
                .iter()
                .map(|&k| {
                    let (a, b) = g.gap(k);
                    scanner.scan_gap(a, b, m, &mut start).map(|p| (k, p))
                })
                .collect()
        })
        .collect();
    let mut per_gap: Vec<(usize, Vec<Probe>)> = Vec::with_capacity(gaps.len());
    for r in scanned {
        per_gap.extend(r?);
    }

    // Best sample per gap, then the top gaps by value.
    let mut ranked: Vec<(usize, usize, f64)> = per_gap
        .iter()
        .enumerate()
        .map(|(i, (_, probes))| {
            let (j, p) = probes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
                .expect("non-empty scan");
            (i, j, p.value)
        })
        .collect();
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));

    let mut candidates: Vec<Probe> = Vec::new();
    for &(i, j, _) in ranked.iter().take(opts.refine_gaps.max(1)) {
        let (k, probes) = &per_gap[i];
        let (a, b) = g.gap(*k);
        let lo = if j == 0 { a } else { probes[j - 1].x };
        let hi = if j + 1 == probes.len() { b } else { probes[j + 1].x };
        let mut best = scanner.refine(lo, hi, &probes[j], opts.refine_tol)?;
        if best.x > 0.0 {
            // Only the centre gap reaches x > 0; take the mirror image.
            best = scanner.probe(-best.x, Some(&best.basis))?;
        }
        candidates.push(best);
    }
    let top = candidates.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let chosen = candidates
        .into_iter()
        .filter(|p| p.value >= top * (1.0 - TIE_REL))
        .min_by(|a, b| a.x.total_cmp(&b.x))
        .expect("at least one candidate");

    let sol = scanner.solver.solve(chosen.x, 1.0, Some(&chosen.basis))?;
    build_solution(&g, d, alpha, chosen.x, sol.poly)
}

fn build_solution(g: &Grid, d: usize, alpha: f64, x_star: f64, poly: ChebPoly) -> Result<ExtremalSolution> {
    let gn = grid_norm(&poly, g).value;
    if !(gn > 0.0) {
        return Err(Error::numeric("pinned solution vanishes on the grid"));
    }
    let mut poly = poly.scaled(1.0 / gn);
    if poly.eval(x_star) < 0.0 {
        poly = poly.scaled(-1.0);
    }
    let ratio = poly.eval(x_star);
    let zeros = roots_in_window_with_spacing(&poly, -OUTSIDE_WINDOW, OUTSIDE_WINDOW, g.spacing())?;
    let outside_zero = zeros.zeros.iter().copied().find(|z| z.abs() > 1.0);
    Ok(ExtremalSolution {
        n: g.n(),
        alpha,
        degree_budget: d,
        poly,
        x_star,
        ratio,
        log_ratio_over_n: ratio.ln() / g.n() as f64,
        zeros,
        outside_zero,
    })
}

/// Checks of the zero structure of an extremal polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// No non-real eigenvalues and every real zero simple.
    pub all_real_simple: bool,
    pub count_in_open_interval: usize,
    /// At most one zero in every open grid gap.
    pub separation_ok: bool,
    pub max_zeros_per_gap: usize,
    /// Real zeros outside `[-1, 1]`, including beyond the window.
    pub outside_count: usize,
    /// `degree_budget` minus the number of real zeros in `[-10, 10]`.
    pub degree_deficit: usize,
    pub details: StructureDetails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureDetails {
    /// Zero count of each open gap `(xi_k, xi_{k+1})`.
    pub zeros_per_gap: Vec<usize>,
    /// Zeros that coincide with grid points.
    pub zeros_on_grid: usize,
    pub complex_roots: usize,
    /// Smallest `|p'(z)|` relative to the local scale of `p`.
    pub min_relative_slope: f64,
}

/// Zero structure of an extremal polynomial; failures are reported as flags.
pub fn analyze_structure(sol: &ExtremalSolution) -> StructureReport {
    let g = match Grid::new(sol.n) {
        Ok(g) => g,
        Err(_) => return failed_report(sol),
    };
    let spec = match spectrum(&sol.poly) {
        Ok(s) => s,
        Err(_) => return failed_report(sol),
    };
    let h = g.spacing();
    let dp = sol.poly.derivative();
    let mut min_slope = f64::INFINITY;
    for &z in &spec.real {
        // Local scale of p' near z: max |p| over a grid spacing, divided by it.
        let scale = (-4..=4)
            .map(|i| sol.poly.eval(z + 0.25 * h * i as f64).abs())
            .fold(0.0, f64::max)
            / h;
        let rel = if scale > 0.0 { dp.eval(z).abs() / scale } else { 0.0 };
        min_slope = min_slope.min(rel);
    }
    let simple = spec.real.windows(2).all(|w| w[1] - w[0] > 1e-12) && min_slope > 1e-8;
    let all_real_simple = spec.complex.is_empty() && (spec.real.is_empty() || simple);

    let mut zeros_per_gap = vec![0usize; g.gap_count()];
    let mut zeros_on_grid = 0;
    let mut inside = 0;
    for &z in &spec.real {
        if z <= -1.0 || z >= 1.0 {
            continue;
        }
        inside += 1;
        if g.grid_index(z, 1e-14).is_some() {
            zeros_on_grid += 1;
        } else if let Some(k) = g.gap_containing(z) {
            zeros_per_gap[k] += 1;
        }
    }
    let max_zeros_per_gap = zeros_per_gap.iter().copied().max().unwrap_or(0);
    let in_window = spec.real.iter().filter(|z| z.abs() <= OUTSIDE_WINDOW).count();
    StructureReport {
        all_real_simple,
        count_in_open_interval: inside,
        separation_ok: max_zeros_per_gap <= 1,
        max_zeros_per_gap,
        outside_count: spec.real.iter().filter(|z| z.abs() > 1.0).count(),
        degree_deficit: sol.degree_budget.saturating_sub(in_window),
        details: StructureDetails {
            zeros_per_gap,
            zeros_on_grid,
            complex_roots: spec.complex.len(),
            min_relative_slope: if min_slope.is_finite() { min_slope } else { 0.0 },
        },
    }
}

fn failed_report(sol: &ExtremalSolution) -> StructureReport {
    StructureReport {
        all_real_simple: false,
        count_in_open_interval: 0,
        separation_ok: false,
        max_zeros_per_gap: 0,
        outside_count: 0,
        degree_deficit: sol.degree_budget,
        details: StructureDetails {
            zeros_per_gap: vec![],
            zeros_on_grid: 0,
            complex_roots: 0,
            min_relative_slope: 0.0,
        },
    }
}

impl StructureReport {
    /// All zero-structure claims for a degree budget `d`: real simple zeros,
    /// at least `d - 1` in `(-1, 1)`, one per gap, at most one outside.
    pub fn holds(&self, d: usize) -> bool {
        self.all_real_simple
            && self.count_in_open_interval + 1 >= d
            && self.separation_ok
            && self.outside_count <= 1
    }
}

/// Step CDF of a zero set with weight `1/n` per zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountingMeasure {
    pub n: usize,
    /// Sorted jump locations in `[-1, 1]`.
    pub zeros: Vec<f64>,
    /// `(x, F(x))` right after each jump.
    pub steps: Vec<(f64, f64)>,
    pub mass: f64,
    /// Zeros outside `[-1, 1]` that were clamped to the nearer endpoint.
    pub clamped: Vec<f64>,
}

impl ZeroCountingMeasure {
    pub fn from_zeros(zeros: &[f64], n: usize) -> Self {
        let mut clamped = Vec::new();
        let mut z: Vec<f64> = zeros
            .iter()
            .map(|&x| {
                if x.abs() > 1.0 {
                    clamped.push(x);
                }
                x.clamp(-1.0, 1.0)
            })
            .collect();
        z.sort_by(|a, b| a.total_cmp(b));
        let w = 1.0 / n as f64;
        let steps = z.iter().enumerate().map(|(i, &x)| (x, w * (i + 1) as f64)).collect();
        ZeroCountingMeasure {
            n,
            mass: w * z.len() as f64,
            zeros: z,
            steps,
            clamped,
        }
    }

    /// `nu_n([-1, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.zeros.partition_point(|&z| z <= x) as f64 / self.n as f64
    }

    /// Mass just left of `x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.zeros.partition_point(|&z| z < x) as f64 / self.n as f64
    }
}

/// Zero counting measure of an extremal polynomial.
pub fn zero_counting_measure(sol: &ExtremalSolution) -> ZeroCountingMeasure {
    ZeroCountingMeasure::from_zeros(&sol.zeros.zeros, sol.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lebesgue(nodes: &[f64], x: f64) -> f64 {
        (0..nodes.len())
            .map(|i| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &xj)| (x - xj) / (nodes[i] - xj))
                    .product::<f64>()
                    .abs()
            })
            .sum()
    }

    #[test]
    fn phi_small_cases() {
        let g = Grid::new(3).unwrap();
        assert!((phi(&g, 2, 0.5).unwrap() - 1.25).abs() < 1e-12);
        let g2 = Grid::new(2).unwrap();
        assert!((phi(&g2, 1, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(phi(&g, 2, 0.0).unwrap(), 1.0);
        assert!(phi(&g, 3, 0.5).is_err());
    }

    #[test]
    fn phi_near_grid_point() {
        let g = Grid::new(5).unwrap();
        let v = phi(&g, 2, 0.5 + 1e-6).unwrap();
        assert!(v >= 1.0 - 1e-12 && v <= 1.0 + 1e-3, "{v}");
    }

    #[test]
    fn three_point_extremal() {
        let s = solve_ratio_extremal(3, 2.0 / 3.0).unwrap();
        assert_eq!(s.degree_budget, 2);
        assert!((s.ratio - 1.25).abs() < 1e-9);
        assert!((s.x_star + 0.5).abs() < 1e-8, "{}", s.x_star);
        // 1 - x - x^2: zeros (sqrt 5 - 1)/2 inside, -(sqrt 5 + 1)/2 outside.
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        assert!((s.zeros.zeros[1] - golden).abs() < 1e-12);
        assert!((s.outside_zero.unwrap() + 1.0 + golden).abs() < 1e-12);
        let rep = analyze_structure(&s);
        assert!(rep.all_real_simple);
        assert_eq!(rep.count_in_open_interval, 1);
        assert_eq!(rep.outside_count, 1);
        assert!(rep.separation_ok && rep.holds(2));
    }

    #[test]
    fn linear_budget_gives_ratio_one() {
        let s = solve_ratio_extremal_with(5, 1, 0.2, RatioOptions::default()).unwrap();
        assert!((s.ratio - 1.0).abs() < 1e-12);
        let rep = analyze_structure(&s);
        assert!(rep.separation_ok && rep.count_in_open_interval <= 1);
    }

    #[test]
    fn full_degree_matches_lebesgue_constant() {
        for n in 3..=8 {
            let g = Grid::new(n).unwrap();
            let s = solve_ratio_extremal_with(n, n - 1, 1.0, RatioOptions::default()).unwrap();
            let (lo, hi) = g.gap(0);
            let mut best = 0.0f64;
            for k in 0..=20_000 {
                best = best.max(lebesgue(g.points(), lo + (hi - lo) * k as f64 / 20_000.0));
            }
            assert!((s.ratio - best).abs() < 1e-8 * best, "n={n}: {} vs {best}", s.ratio);
        }
    }

    #[test]
    fn invalid_budgets() {
        assert!(solve_ratio_extremal(10, 0.05).is_err());
        assert!(matches!(
            solve_ratio_extremal_with(3, 3, 0.99, RatioOptions::default()),
            Err(Error::DegenerateProblem(_))
        ));
        assert!(solve_ratio_extremal(2, 0.5).is_err());
        assert!(solve_ratio_extremal(10, 1.0).is_err());
    }

    #[test]
    fn degree_budget_floor() {
        assert_eq!(degree_budget(3, 0.67), 2);
        assert_eq!(degree_budget(3, 2.0 / 3.0), 2);
        assert_eq!(degree_budget(20, 0.7), 14);
        assert_eq!(degree_budget(10, 0.29), 2);
        assert_eq!(degree_budget(100, 0.07), 7);
    }

    #[test]
    fn forty_point_structure() {
        let s = solve_ratio_extremal(40, 0.5).unwrap();
        let rep = analyze_structure(&s);
        assert!(rep.all_real_simple, "{rep:?}");
        assert!(rep.count_in_open_interval >= 19);
        assert_eq!(rep.max_zeros_per_gap, 1);
        assert!(rep.holds(20));
        assert!((s.poly.eval(s.x_star) - s.ratio).abs() < 1e-9 * s.ratio);
        let gn = grid_norm(&s.poly, &Grid::new(40).unwrap()).value;
        assert!((gn - 1.0).abs() < 1e-12);
        assert!(s.x_star <= 0.0);
    }

    #[test]
    fn zero_counting_steps() {
        let m = ZeroCountingMeasure::from_zeros(&[0.5, -0.5], 3);
        assert_eq!(m.steps, vec![(-0.5, 1.0 / 3.0), (0.5, 2.0 / 3.0)]);
        assert_eq!(m.cdf(0.0), 1.0 / 3.0);
        assert_eq!(m.cdf_left(-0.5), 0.0);
        let e = ZeroCountingMeasure::from_zeros(&[], 7);
        assert_eq!(e.mass, 0.0);
        assert_eq!(e.cdf(1.0), 0.0);
        let c = ZeroCountingMeasure::from_zeros(&[2.0], 4);
        assert_eq!(c.clamped, vec![2.0]);
        assert_eq!(c.zeros, vec![1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ratio_monotone_in_budget(n in 6usize..16, frac in 0.2f64..0.8) {
            let d = ((frac * n as f64) as usize).clamp(1, n - 2);
            let a = solve_ratio_extremal_with(n, d, 0.0, RatioOptions::default()).unwrap();
            let b = solve_ratio_extremal_with(n, d + 1, 0.0, RatioOptions::default()).unwrap();
            prop_assert!(a.ratio >= 1.0 - 1e-12);
            prop_assert!(b.ratio >= a.ratio * (1.0 - 1e-9));
            prop_assert!(a.log_ratio_over_n <= std::f64::consts::LN_2 + 0.05);
        }

        #[test]
        fn structure_holds_small(n in 5usize..24, frac in 0.15f64..0.85) {
            let d = ((frac * n as f64) as usize).clamp(1, n - 1);
            let s = solve_ratio_extremal_with(n, d, 0.0, RatioOptions::default()).unwrap();
            let rep = analyze_structure(&s);
            prop_assert!(rep.holds(d), "{:?}", rep);
        }
    }
}
