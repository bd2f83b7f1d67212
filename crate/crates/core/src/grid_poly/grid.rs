use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The `n` equally spaced points `(2k - n - 1) / (n - 1)`, `k = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    points: Vec<f64>,
}

pub fn make_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("grid needs n >= 2, got {n}")));
        }
        let denom = (n - 1) as f64;
        let points = (1..=n)
            .map(|k| (2.0 * k as f64 - n as f64 - 1.0) / denom)
            .collect();
        Ok(Grid { n, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn gap_count(&self) -> usize {
        self.n - 1
    }

    /// Open gap `(xi_k, xi_{k+1})` bounds, zero based.
    pub fn gap(&self, k: usize) -> (f64, f64) {
        (self.points[k], self.points[k + 1])
    }

    /// Index of the grid point within `tol` of `x`, if any.
    pub fn grid_index(&self, x: f64, tol: f64) -> Option<usize> {
        let pos = (x + 1.0) / self.spacing();
        let k = pos.round();
        if k < 0.0 || k > (self.n - 1) as f64 {
            return None;
        }
        let k = k as usize;
        ((self.points[k] - x).abs() <= tol).then_some(k)
    }

    /// Index `k` of the open gap `(xi_k, xi_{k+1})` containing `x`. Grid points
    /// and points outside `[-1, 1]` belong to no gap.
    pub fn gap_containing(&self, x: f64) -> Option<usize> {
        if !(x > -1.0 && x < 1.0) {
            return None;
        }
        let mut k = (((x + 1.0) / self.spacing()).floor() as usize).min(self.n - 2);
        // The floor can be off by one next to a node.
        if x < self.points[k] {
            k = k.checked_sub(1)?;
        } else if x >= self.points[k + 1] {
            k += 1;
        }
        if k + 1 >= self.n {
            return None;
        }
        (x > self.points[k] && x < self.points[k + 1]).then_some(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        assert_eq!(make_grid(2).unwrap().points(), &[-1.0, 1.0]);
        assert_eq!(make_grid(3).unwrap().points(), &[-1.0, 0.0, 1.0]);
        assert_eq!(make_grid(5).unwrap().points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(matches!(make_grid(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn constant_spacing() {
        for n in [2, 7, 40, 161, 400] {
            let g = make_grid(n).unwrap();
            let h = g.spacing();
            assert_eq!(g.points()[0], -1.0);
            assert_eq!(g.points()[n - 1], 1.0);
            for w in g.points().windows(2) {
                assert!(w[1] > w[0]);
                assert!(((w[1] - w[0]) - h).abs() < 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn gap_lookup() {
        let g = make_grid(5).unwrap();
        assert_eq!(g.gap_containing(-0.75), Some(0));
        assert_eq!(g.gap_containing(0.3), Some(2));
        assert_eq!(g.gap_containing(0.999), Some(3));
        assert_eq!(g.gap_containing(0.5), None);
        assert_eq!(g.gap_containing(-1.0), None);
        assert_eq!(g.gap_containing(1.5), None);
        assert_eq!(g.grid_index(0.5 + 1e-14, 1e-12), Some(3));
        assert_eq!(g.grid_index(0.51, 1e-12), None);
    }
}
