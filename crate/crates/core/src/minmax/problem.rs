use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lp::{lp_core_with, LinearProgram, LpError, LpOptions, LpSolution};
use super::table::{cheb_row, ChebTable};
use super::DenseLu;
use crate::grid_poly::{ChebPoly, Grid};
use crate::{Error, Result};

/// Relative width of the active set around the grid maximum.
const ACTIVE_REL_TOL: f64 = 1e-9;
/// Rounding allowance, in units of `eps * sum |c_j|`, for grid values.
const ACTIVE_NOISE: f64 = 1024.0;
/// Acceptance of the primal-dual gap, relative to `1 + |objective|`.
const GAP_TOL: f64 = 1e-9;
/// Iteration budget of a warm-started pinned solve, per LP variable.
const WARM_ITERATIONS_PER_VAR: usize = 8;
/// Rounding allowance for the gap, in units of `eps * certificate_scale`.
const GAP_NOISE: f64 = 64.0;

/// A finite min-max problem over `constraint_points`.
///
/// Without a pin: minimize `max_k |f(x_k) + sum_{j < basis_dim} c_j T_j(x_k)|`
/// where `f` is the fixed part. With a pin `x*`: maximize `p(x*)` over
/// `p = sum_{j < basis_dim} c_j T_j` subject to `|p(x_k)| <= grid_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxProblem {
    pub constraint_points: Vec<f64>,
    pub basis_dim: usize,
    pub pin: Option<f64>,
    pub grid_bound: f64,
    pub fixed_part: Option<ChebPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxSolution {
    pub poly: ChebPoly,
    /// Minimal grid maximum (unpinned) or maximal value at the pin.
    pub objective: f64,
    /// Constraint indices where `|p|` reaches the grid maximum.
    pub active_set: Vec<usize>,
    /// Sign of `p` on each member of the active set.
    pub signs: Vec<i8>,
    pub iterations: usize,
    pub certificate_gap: f64,
    /// Magnitude of the terms summed into `certificate_gap`.
    pub certificate_scale: f64,
    /// `max_k |p(x_k)|` recomputed from the returned polynomial.
    pub grid_max: f64,
    /// Constraint indices of the optimal LP basis.
    pub basis_nodes: Vec<usize>,
}

impl MinMaxSolution {
    fn certified(self) -> Result<Self> {
        let tol = (GAP_TOL * (1.0 + self.objective.abs())).max(GAP_NOISE * f64::EPSILON * self.certificate_scale);
        if self.certificate_gap > tol {
            return Err(Error::numeric(format!(
                "primal-dual gap {:.3e} too large for objective {:.6e} (term scale {:.3e})",
                self.certificate_gap, self.objective, self.certificate_scale
            )));
        }
        Ok(self)
    }
}

impl MinMaxProblem {
    pub fn solve(&self) -> Result<MinMaxSolution> {
        let pts = &self.constraint_points;
        if pts.iter().any(|x| !x.is_finite()) || pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("constraint points must be finite, distinct and sorted"));
        }
        if self.basis_dim == 0 {
            return Err(Error::invalid("basis_dim must be positive"));
        }
        match (self.pin, &self.fixed_part) {
            (Some(_), Some(_)) => Err(Error::invalid("a pinned problem takes no fixed part")),
            (Some(x), None) => {
                if self.basis_dim > pts.len() {
                    return Err(Error::DegenerateProblem(format!(
                        "{} free coefficients against {} constraint points: unbounded",
                        self.basis_dim,
                        pts.len()
                    )));
                }
                if pts.contains(&x) {
                    return Err(Error::invalid(format!("pin {x} is a constraint point")));
                }
                let solver = PinnedSolver::new(ChebTable::shared(pts, self.basis_dim - 1));
                solver.solve(x, self.grid_bound, None)
            }
            (None, Some(f)) => {
                if self.basis_dim >= pts.len() {
                    return Err(Error::DegenerateProblem(format!(
                        "{} free coefficients interpolate {} points: minimum is 0",
                        self.basis_dim,
                        pts.len()
                    )));
                }
                solve_fixed_min(pts, self.basis_dim, f)?.certified()
            }
            (None, None) => Err(Error::invalid(
                "an unpinned problem needs a fixed part (otherwise the minimum is 0)",
            )),
        }
    }
}

/// Monic polynomial of degree `d` with the smallest maximum on the grid.
///
/// Solved with `T_d` as the fixed part and rescaled by `2^(1-d)`: the free
/// coefficients then stay of unit size instead of cancelling a monomial.
pub fn solve_monic_min(g: &Grid, d: usize) -> Result<MinMaxSolution> {
    if d == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    if d >= g.n() {
        return Err(Error::DegenerateProblem(format!(
            "degree {d} >= n = {}: a monic polynomial vanishes on the whole grid",
            g.n()
        )));
    }
    let scale = 0.5f64.powi(d as i32 - 1);
    let mut s = solve_fixed_min(g.points(), d, &ChebPoly::basis(d))?;
    s.poly = s.poly.scaled(scale);
    s.objective *= scale;
    s.grid_max *= scale;
    s.certificate_gap *= scale;
    s.certificate_scale *= scale;
    s.certified()
}

/// `max p(x*)` over degree `<= d` with `|p| <= 1` on the grid.
pub fn solve_pinned_max(g: &Grid, d: usize, x_star: f64) -> Result<MinMaxSolution> {
    solve_pinned_max_bound(g, d, x_star, 1.0)
}

/// As [`solve_pinned_max`] with grid bound `bound` instead of one.
pub fn solve_pinned_max_bound(g: &Grid, d: usize, x_star: f64, bound: f64) -> Result<MinMaxSolution> {
    check_pinned_args(g, d, x_star)?;
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::invalid(format!("grid bound must be positive, got {bound}")));
    }
    PinnedSolver::new(ChebTable::shared(g.points(), d)).solve(x_star, bound, None)
}

pub(crate) fn check_pinned_args(g: &Grid, d: usize, x_star: f64) -> Result<()> {
    if d >= g.n() {
        return Err(Error::DegenerateProblem(format!(
            "degree {d} >= n = {}: the pinned maximum is unbounded",
            g.n()
        )));
    }
    if !(-1.0..=1.0).contains(&x_star) {
        return Err(Error::invalid(format!("x* = {x_star} outside [-1, 1]")));
    }
    if g.grid_index(x_star, 0.0).is_some() {
        return Err(Error::invalid(format!("x* = {x_star} is a grid point")));
    }
    Ok(())
}

/// `m` distinct point indices out of `n` nearest to the Chebyshev extreme
/// points, strictly increasing.
pub(crate) fn default_start_nodes(n: usize, m: usize) -> Vec<usize> {
    assert!(m >= 1 && m <= n);
    if m == 1 {
        return vec![n / 2];
    }
    let mut idx = Vec::with_capacity(m);
    for j in 0..m {
        let x = -(std::f64::consts::PI * j as f64 / (m - 1) as f64).cos();
        let k = ((x + 1.0) * 0.5 * (n - 1) as f64).round() as usize;
        let lo = idx.last().map_or(0, |&p: &usize| p + 1);
        let hi = n - m + j;
        idx.push(k.clamp(lo, hi));
    }
    idx
}

/// Repeated pinned maximizations against one constraint table.
#[derive(Debug, Clone)]
pub(crate) struct PinnedSolver {
    table: Arc<ChebTable>,
    a: DMatrix<f64>,
}

impl PinnedSolver {
    pub(crate) fn new(table: Arc<ChebTable>) -> Self {
        let w = table.degree() + 1;
        let n = table.points().len();
        let mut a = DMatrix::zeros(2 * n, w);
        for k in 0..n {
            for (j, &t) in table.row(k).iter().enumerate() {
                a[(2 * k, j)] = t;
                a[(2 * k + 1, j)] = -t;
            }
        }
        PinnedSolver { table, a }
    }

    /// `start` is a set of `d + 1` node indices (for instance the basis of a
    /// nearby solve); signs are chosen from the Lagrange weights so that the
    /// starting basis is feasible for the dual.
    pub(crate) fn solve(&self, x_star: f64, bound: f64, start: Option<&[usize]>) -> Result<MinMaxSolution> {
        let d = self.table.degree();
        let n = self.table.points().len();
        let target = cheb_row(x_star, d);
        let lp = LinearProgram {
            a: self.a.clone(),
            b: vec![bound; 2 * n],
            c: target.iter().map(|v| -v).collect(),
            equality_rows: vec![],
        };
        let cold = default_start_nodes(n, d + 1);
        let sol = match start {
            Some(s) if s.len() == d + 1 && s.iter().all(|&k| k < n) && s != cold.as_slice() => {
                // A warm start can stall on a degenerate vertex; fall back to
                // the cold start rather than spend the full iteration budget.
                let rows = signed_rows(&self.table, s, target.clone());
                match run_lp(&lp, rows, Some(WARM_ITERATIONS_PER_VAR * (d + 1))) {
                    Err(Error::Lp(LpError::IterationLimit(_))) => {
                        run_lp(&lp, signed_rows(&self.table, &cold, target), None)?
                    }
                    other => other?,
                }
            }
            _ => run_lp(&lp, signed_rows(&self.table, &cold, target), None)?,
        };
        let poly = ChebPoly::new(sol.x.clone());
        finish(&self.table, poly, -sol.objective, &sol, None)?.certified()
    }
}

/// Rows `2k` or `2k + 1` for each node, by the sign of `w` in `M w = rhs`
/// with `M[j][i] = T_j(x_{nodes[i]})`.
fn signed_rows(table: &ChebTable, nodes: &[usize], mut rhs: Vec<f64>) -> Option<Vec<usize>> {
    let m = nodes.len();
    let mut mat = vec![0.0; m * m];
    for (i, &k) in nodes.iter().enumerate() {
        for (j, &t) in table.row(k).iter().take(m).enumerate() {
            mat[j * m + i] = t;
        }
    }
    let lu = DenseLu::factor(mat, m)?;
    lu.solve(&mut rhs);
    Some(
        nodes
            .iter()
            .zip(&rhs)
            .map(|(&k, &w)| if w >= 0.0 { 2 * k } else { 2 * k + 1 })
            .collect(),
    )
}

fn run_lp(lp: &LinearProgram, start_rows: Option<Vec<usize>>, max_iterations: Option<usize>) -> Result<LpSolution> {
    let opts = LpOptions {
        start_rows,
        max_iterations,
    };
    match lp_core_with(lp, &opts) {
        Ok(s) => Ok(s),
        Err(e @ (LpError::Infeasible | LpError::Unbounded)) => Err(Error::numeric(format!(
            "linear program reported {e} for a problem that is feasible and bounded"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn solve_fixed_min(points: &[f64], m: usize, fixed: &ChebPoly) -> Result<MinMaxSolution> {
    let df = fixed.degree();
    let deg = df.max(m.saturating_sub(1));
    let table = ChebTable::new(points, deg);
    let n = points.len();
    let f: Vec<f64> = (0..n).map(|k| table.eval_at(k, fixed.coeffs())).collect();

    // Variables (c_0 .. c_{m-1}, t).
    let mut a = DMatrix::zeros(2 * n, m + 1);
    let mut b = vec![0.0; 2 * n];
    for k in 0..n {
        for (j, &t) in table.row(k).iter().take(m).enumerate() {
            a[(2 * k, j)] = t;
            a[(2 * k + 1, j)] = -t;
        }
        a[(2 * k, m)] = -1.0;
        a[(2 * k + 1, m)] = -1.0;
        b[2 * k] = -f[k];
        b[2 * k + 1] = f[k];
    }
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    let lp = LinearProgram {
        a,
        b,
        c,
        equality_rows: vec![],
    };

    // Alternating start: w with sum_k w_k T_j(x_k) = 0 for j < m, sum_k w_k T_m(x_k) = 1.
    let nodes = default_start_nodes(n, m + 1);
    let start = if df == m {
        let mut e = vec![0.0; m + 1];
        e[m] = 1.0;
        let full = ChebTable::new(points, m);
        signed_rows(&full, &nodes, e)
    } else {
        None
    };
    let sol = run_lp(&lp, start, None)?;

    let mut coeffs = fixed.coeffs().to_vec();
    coeffs.resize(coeffs.len().max(m), 0.0);
    for (cj, x) in coeffs.iter_mut().zip(&sol.x[..m]) {
        *cj += x;
    }
    let poly = ChebPoly::new(coeffs);
    finish(&table, poly, sol.x[m], &sol, Some(fixed))
}

fn finish(
    table: &ChebTable,
    poly: ChebPoly,
    objective: f64,
    sol: &LpSolution,
    fixed: Option<&ChebPoly>,
) -> Result<MinMaxSolution> {
    let n = table.points().len();
    let vals: Vec<f64> = (0..n).map(|k| table.eval_at(k, poly.coeffs())).collect();
    let grid_max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let gap = sol.gap;
    let coeff_sum: f64 = poly.coeffs().iter().map(|c| c.abs()).sum::<f64>()
        + fixed.map_or(0.0, |f| f.coeffs().iter().map(|c| c.abs()).sum());
    let noise = ACTIVE_NOISE * f64::EPSILON * coeff_sum;
    let threshold = grid_max - (ACTIVE_REL_TOL * grid_max).max(noise);
    let mut basis_nodes: Vec<usize> = sol.basis_rows.iter().map(|r| r / 2).collect();
    basis_nodes.sort_unstable();
    basis_nodes.dedup();
    let active_set: Vec<usize> = (0..n)
        .filter(|&k| vals[k].abs() >= threshold || basis_nodes.binary_search(&k).is_ok())
        .collect();
    let signs = active_set
        .iter()
        .map(|&k| if vals[k] > 0.0 { 1 } else if vals[k] < 0.0 { -1 } else { 0 })
        .collect();
    Ok(MinMaxSolution {
        poly,
        objective,
        active_set,
        signs,
        iterations: sol.iterations,
        certificate_gap: gap,
        certificate_scale: sol.gap_scale,
        grid_max,
        basis_nodes,
    })
}
