//! Dense linear programming by the revised simplex method.
//!
//! The problem solved is
//!
//! ```text
//! minimize    c^T x
//! subject to  A_i x <= b_i   (i not in equality_rows)
//!             A_i x  = b_i   (i in equality_rows)
//!             x free
//! ```
//!
//! The simplex runs on the dual in standard form,
//! `min b^T l  s.t.  A^T l = -c,  l >= 0` (equality rows contribute a pair of
//! opposite columns), so the basis has one entry per primal variable and the
//! simplex multipliers are the primal solution. A basis of primal rows that is
//! known to be dual feasible can be passed in to skip phase one.

use nalgebra::DMatrix;
use thiserror::Error;

use super::DenseLu;

const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
/// Rounding allowance per unit of `sum |A_ij x_j|` when pricing.
const NOISE: f64 = 64.0 * f64::EPSILON;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("the linear program is infeasible")]
    Infeasible,
    #[error("the linear program is unbounded (or infeasible)")]
    Unbounded,
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("basis matrix became singular")]
    SingularBasis,
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Constraint matrix, one row per constraint.
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub equality_rows: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct LpOptions {
    pub max_iterations: Option<usize>,
    /// Rows whose dual columns form a starting basis (one per variable). Used
    /// only if the basis is nonsingular and dual feasible.
    pub start_rows: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Multiplier per row; nonnegative on inequality rows.
    pub dual: Vec<f64>,
    pub objective: f64,
    /// `|c^T x + b^T dual|`, the primal-dual objective gap.
    pub gap: f64,
    /// `sum |c_j x_j| + sum |b_i dual_i|`: the size of the terms behind `gap`,
    /// so rounding alone leaves a gap of order `eps * gap_scale`.
    pub gap_scale: f64,
    /// Largest constraint violation of `x`.
    pub max_violation: f64,
    pub iterations: usize,
    /// Rows whose dual columns are basic at the optimum.
    pub basis_rows: Vec<usize>,
}

/// Solves the program with default options.
pub fn lp_core(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp_core_with(lp, &LpOptions::default())
}

pub fn lp_core_with(lp: &LinearProgram, opts: &LpOptions) -> Result<LpSolution, LpError> {
    let solver = Simplex::new(lp)?;
    solver.run(opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    m: usize,
    nv: usize,
    /// Dual columns: (row, sign).
    cols: Vec<(usize, f64)>,
    /// Index of the first column of each row in `cols`.
    first_col: Vec<usize>,
    is_eq: Vec<bool>,
    rhs: Vec<f64>,
    art_sign: Vec<f64>,
    row_abs: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram) -> Result<Self, LpError> {
        let (m, nv) = lp.a.shape();
        if lp.b.len() != m || lp.c.len() != nv {
            return Err(LpError::Malformed(format!(
                "A is {m}x{nv}, b has {}, c has {}",
                lp.b.len(),
                lp.c.len()
            )));
        }
        if lp.a.iter().chain(&lp.b).chain(&lp.c).any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("non-finite entry".into()));
        }
        let mut is_eq = vec![false; m];
        for &i in &lp.equality_rows {
            if i >= m {
                return Err(LpError::Malformed(format!("equality row {i} out of range")));
            }
            is_eq[i] = true;
        }
        let mut cols = Vec::with_capacity(m);
        let mut first_col = Vec::with_capacity(m);
        for (i, &eq) in is_eq.iter().enumerate() {
            first_col.push(cols.len());
            cols.push((i, 1.0));
            if eq {
                cols.push((i, -1.0));
            }
        }
        let rhs: Vec<f64> = lp.c.iter().map(|v| -v).collect();
        let art_sign = rhs.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let row_abs = (0..m)
            .map(|i| lp.a.row(i).iter().fold(0.0f64, |s, v| s.max(v.abs())))
            .collect();
        Ok(Simplex {
            lp,
            m,
            nv,
            cols,
            first_col,
            is_eq,
            rhs,
            art_sign,
            row_abs,
        })
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn is_art(&self, j: usize) -> bool {
        j >= self.ncols()
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        if self.is_art(j) {
            out.iter_mut().for_each(|v| *v = 0.0);
            let k = j - self.ncols();
            out[k] = self.art_sign[k];
        } else {
            let (row, s) = self.cols[j];
            for (o, a) in out.iter_mut().zip(self.lp.a.row(row).iter()) {
                *o = s * a;
            }
        }
    }

    fn cost(&self, j: usize, phase: Phase) -> f64 {
        match (phase, self.is_art(j)) {
            (Phase::One, true) => 1.0,
            (Phase::One, false) | (Phase::Two, true) => 0.0,
            (Phase::Two, false) => {
                let (row, s) = self.cols[j];
                s * self.lp.b[row]
            }
        }
    }

    fn factor(&self, basis: &[usize]) -> Result<DenseLu, LpError> {
        let nv = self.nv;
        let mut mat = vec![0.0; nv * nv];
        let mut col = vec![0.0; nv];
        for (p, &j) in basis.iter().enumerate() {
            self.column(j, &mut col);
            for (i, v) in col.iter().enumerate() {
                mat[i * nv + p] = *v;
            }
        }
        DenseLu::factor(mat, nv).ok_or(LpError::SingularBasis)
    }

    fn run(&self, opts: &LpOptions) -> Result<LpSolution, LpError> {
        let max_iter = opts
            .max_iterations
            .unwrap_or(50 * (self.m + self.nv) + 1000);
        if self.nv == 0 {
            return self.trivial();
        }
        let mut iterations = 0;
        let basis = match opts.start_rows.as_deref().and_then(|r| self.warm_basis(r)) {
            Some(b) => b,
            None => {
                let mut basis: Vec<usize> = (0..self.nv).map(|k| self.ncols() + k).collect();
                self.iterate(&mut basis, Phase::One, max_iter, &mut iterations)?;
                let lu = self.factor(&basis)?;
                let mut xb = self.rhs.clone();
                lu.solve(&mut xb);
                let infeas: f64 = basis
                    .iter()
                    .zip(&xb)
                    .filter(|(&j, _)| self.is_art(j))
                    .map(|(_, v)| v.abs())
                    .sum();
                let scale = 1.0 + self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if infeas > FEAS_TOL * scale {
                    return Err(LpError::Unbounded);
                }
                self.drive_out_artificials(&mut basis)?;
                basis
            }
        };
        let mut basis = basis;
        self.iterate(&mut basis, Phase::Two, max_iter, &mut iterations)?;
        self.finish(&basis, iterations)
    }

    /// No variables: feasible iff `0 <= b` (and `0 = b` on equality rows).
    fn trivial(&self) -> Result<LpSolution, LpError> {
        let mut viol = 0.0f64;
        for i in 0..self.m {
            let v = if self.is_eq[i] { self.lp.b[i].abs() } else { -self.lp.b[i] };
            viol = viol.max(v);
        }
        if viol > FEAS_TOL {
            return Err(LpError::Infeasible);
        }
        Ok(LpSolution {
            x: vec![],
            dual: vec![0.0; self.m],
            objective: 0.0,
            gap: 0.0,
            gap_scale: 0.0,
            max_violation: viol.max(0.0),
            iterations: 0,
            basis_rows: vec![],
        })
    }

    fn warm_basis(&self, rows: &[usize]) -> Option<Vec<usize>> {
        if rows.len() != self.nv || rows.iter().any(|&r| r >= self.m) {
            return None;
        }
        let mut basis: Vec<usize> = rows.iter().map(|&r| self.first_col[r]).collect();
        let lu = self.factor(&basis).ok()?;
        let mut xb = self.rhs.clone();
        lu.solve(&mut xb);
        let scale = 1.0 + xb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (p, &v) in xb.iter().enumerate() {
            if v < -FEAS_TOL * scale {
                let row = rows[p];
                if self.is_eq[row] {
                    basis[p] += 1;
                } else {
                    return None;
                }
            }
        }
        Some(basis)
    }

    fn drive_out_artificials(&self, basis: &mut [usize]) -> Result<(), LpError> {
        let mut col = vec![0.0; self.nv];
        for p in 0..basis.len() {
            if !self.is_art(basis[p]) {
                continue;
            }
            let lu = self.factor(basis)?;
            let mut rho = vec![0.0; self.nv];
            rho[p] = 1.0;
            lu.solve_transpose(&mut rho);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols() {
                if basis.contains(&j) {
                    continue;
                }
                self.column(j, &mut col);
                let v: f64 = rho.iter().zip(&col).map(|(a, b)| a * b).sum::<f64>().abs();
                if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                basis[p] = j;
            }
        }
        Ok(())
    }

    fn iterate(
        &self,
        basis: &mut [usize],
        phase: Phase,
        max_iter: usize,
        iterations: &mut usize,
    ) -> Result<(), LpError> {
        let nv = self.nv;
        let mut in_basis = vec![false; self.ncols() + nv];
        for &j in basis.iter() {
            in_basis[j] = true;
        }
        let mut degenerate_run = 0usize;
        let mut col = vec![0.0; nv];
        loop {
            let lu = self.factor(basis)?;
            let mut xb = self.rhs.clone();
            lu.solve(&mut xb);
            let mut pi: Vec<f64> = basis.iter().map(|&j| self.cost(j, phase)).collect();
            lu.solve_transpose(&mut pi);

            // Pricing over all rows at once: a_i . pi.
            let a_pi = &self.lp.a * nalgebra::DVector::from_column_slice(&pi);
            let pi_abs: Vec<f64> = pi.iter().map(|v| v.abs()).collect();
            let bland = degenerate_run >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.ncols() {
                if in_basis[j] {
                    continue;
                }
                let (row, s) = self.cols[j];
                let cj = self.cost(j, phase);
                let rc = cj - s * a_pi[row];
                let noise: f64 = NOISE
                    * self
                        .lp
                        .a
                        .row(row)
                        .iter()
                        .zip(&pi_abs)
                        .map(|(a, p)| a.abs() * p)
                        .sum::<f64>();
                let tol = OPT_TOL * (1.0 + cj.abs()).max(self.row_abs[row]) + noise;
                if rc < -tol {
                    match entering {
                        None => entering = Some((j, rc)),
                        Some((_, best)) if !bland && rc < best => entering = Some((j, rc)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((e, _)) = entering else {
                return Ok(());
            };

            if *iterations >= max_iter {
                return Err(LpError::IterationLimit(max_iter));
            }
            *iterations += 1;

            self.column(e, &mut col);
            let mut delta = col.clone();
            lu.solve(&mut delta);
            let dmax = delta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let piv_tol = PIVOT_TOL * dmax.max(1e-300);

            // Under Bland's rule basic values within tolerance of zero count as
            // zero, so that degenerate ties are recognized as ties.
            let x_scale = 1.0 + xb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let x_floor = if bland { FEAS_TOL * x_scale } else { 1024.0 * f64::EPSILON * x_scale };
            let mut leave: Option<(usize, f64)> = None;
            for p in 0..nv {
                let d = delta[p];
                let blocking_art = phase == Phase::Two && self.is_art(basis[p]) && d.abs() > piv_tol;
                if !(d > piv_tol || blocking_art) {
                    continue;
                }
                let xv = if xb[p] <= x_floor { 0.0 } else { xb[p] };
                let theta = if blocking_art { 0.0 } else { xv / d };
                match leave {
                    None => leave = Some((p, theta)),
                    Some((q, best)) => {
                        let tie = (theta - best).abs() <= 1e-12 * best.max(theta);
                        let wins_tie = if bland { basis[p] < basis[q] } else { d.abs() > delta[q].abs() };
                        if theta < best && !tie || tie && wins_tie {
                            leave = Some((p, theta));
                        }
                    }
                }
            }
            let Some((p, _)) = leave else {
                return Err(match phase {
                    // The phase-one objective is bounded below; no ray exists.
                    Phase::One => LpError::SingularBasis,
                    Phase::Two => LpError::Infeasible,
                });
            };
            if xb[p] <= FEAS_TOL * x_scale {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            in_basis[basis[p]] = false;
            in_basis[e] = true;
            basis[p] = e;
        }
    }

    fn finish(&self, basis: &[usize], iterations: usize) -> Result<LpSolution, LpError> {
        let lu = self.factor(basis)?;
        let mut xb = self.rhs.clone();
        lu.solve(&mut xb);
        let mut x: Vec<f64> = basis.iter().map(|&j| self.cost(j, Phase::Two)).collect();
        lu.solve_transpose(&mut x);

        let mut dual = vec![0.0; self.m];
        let mut basis_rows = Vec::new();
        for (&j, &v) in basis.iter().zip(&xb) {
            if self.is_art(j) {
                continue;
            }
            let (row, s) = self.cols[j];
            dual[row] += s * v.max(0.0);
            basis_rows.push(row);
        }
        let ax = &self.lp.a * nalgebra::DVector::from_column_slice(&x);
        let mut max_violation = 0.0f64;
        for i in 0..self.m {
            let r = ax[i] - self.lp.b[i];
            max_violation = max_violation.max(if self.is_eq[i] { r.abs() } else { r });
        }
        let objective: f64 = self.lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        let dual_obj: f64 = self.lp.b.iter().zip(&dual).map(|(b, l)| b * l).sum();
        let gap_scale = self.lp.c.iter().zip(&x).map(|(c, x)| (c * x).abs()).sum::<f64>()
            + self.lp.b.iter().zip(&dual).map(|(b, l)| (b * l).abs()).sum::<f64>();
        Ok(LpSolution {
            x,
            dual,
            objective,
            gap: (objective + dual_obj).abs(),
            gap_scale,
            max_violation,
            iterations,
            basis_rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(rows: &[&[f64]], b: &[f64], c: &[f64], eq: &[usize]) -> LinearProgram {
        let nv = c.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        LinearProgram {
            a: DMatrix::from_row_slice(rows.len(), nv, &flat),
            b: b.to_vec(),
            c: c.to_vec(),
            equality_rows: eq.to_vec(),
        }
    }

    #[test]
    fn one_variable_abs_bound() {
        // min t  s.t.  -t <= 0.3 and 0.3 <= t
        let s = lp_core(&lp(&[&[-1.0], &[-1.0]], &[0.3, -0.3], &[1.0], &[])).unwrap();
        assert!((s.x[0] - 0.3).abs() < 1e-15);
        assert!((s.objective - 0.3).abs() < 1e-15);
        assert!(s.gap < 1e-15);
    }

    #[test]
    fn no_constraints() {
        let s = lp_core(&lp(&[], &[], &[0.0, 0.0], &[])).unwrap();
        assert_eq!(s.objective, 0.0);
        assert_eq!(s.x, vec![0.0, 0.0]);
        assert_eq!(lp_core(&lp(&[], &[], &[1.0], &[])), Err(LpError::Unbounded));
    }

    #[test]
    fn textbook_two_variable() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0
        let rows: [&[f64]; 5] = [
            &[1.0, 0.0],
            &[0.0, 2.0],
            &[3.0, 2.0],
            &[-1.0, 0.0],
            &[0.0, -1.0],
        ];
        let s = lp_core(&lp(&rows, &[4.0, 12.0, 18.0, 0.0, 0.0], &[-3.0, -5.0], &[])).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        assert!(s.dual.iter().all(|&v| v >= 0.0));
        assert!(s.gap < 1e-12);
    }

    #[test]
    fn equality_rows() {
        // min x + y s.t. x - y = 1, x >= 0, y >= -5: optimum (0, -1)
        let rows: [&[f64]; 3] = [&[1.0, -1.0], &[-1.0, 0.0], &[0.0, -1.0]];
        let s = lp_core(&lp(&rows, &[1.0, 0.0, 5.0], &[1.0, 1.0], &[0])).unwrap();
        assert!((s.x[0] - 0.0).abs() < 1e-12);
        assert!((s.x[1] + 1.0).abs() < 1e-12);
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!((s.dual[0] - 1.0).abs() < 1e-12);
        assert!((s.dual[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x <= 0 and -x <= -1
        let r = lp_core(&lp(&[&[1.0], &[-1.0]], &[0.0, -1.0], &[1.0], &[]));
        assert_eq!(r, Err(LpError::Infeasible));
        // min -x s.t. -x <= 0
        let r = lp_core(&lp(&[&[-1.0]], &[0.0], &[-1.0], &[]));
        assert_eq!(r, Err(LpError::Unbounded));
    }

    #[test]
    fn malformed_input() {
        let mut p = lp(&[&[1.0]], &[1.0], &[1.0], &[]);
        p.b.push(2.0);
        assert!(matches!(lp_core(&p), Err(LpError::Malformed(_))));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints active at the optimum (0, 0).
        let rows: [&[f64]; 5] = [
            &[-1.0, 0.0],
            &[0.0, -1.0],
            &[-1.0, -1.0],
            &[-2.0, -1.0],
            &[-1.0, -2.0],
        ];
        let s = lp_core(&lp(&rows, &[0.0; 5], &[1.0, 1.0], &[])).unwrap();
        assert!(s.objective.abs() < 1e-14);
    }
}
