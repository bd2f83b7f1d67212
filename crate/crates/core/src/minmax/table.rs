use std::sync::Arc;

/// `T_j(x_k)` for `j = 0..=degree` at a fixed set of points, row per point.
///
/// Built once per (point set, degree) and shared read-only between solves.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebTable {
    points: Vec<f64>,
    degree: usize,
    values: Vec<f64>,
}

impl ChebTable {
    pub fn new(points: &[f64], degree: usize) -> Self {
        let w = degree + 1;
        let mut values = vec![0.0; points.len() * w];
        for (k, &x) in points.iter().enumerate() {
            let row = &mut values[k * w..(k + 1) * w];
            row[0] = 1.0;
            if degree >= 1 {
                row[1] = x;
            }
            for j in 2..=degree {
                row[j] = 2.0 * x * row[j - 1] - row[j - 2];
            }
        }
        ChebTable {
            points: points.to_vec(),
            degree,
            values,
        }
    }

    pub fn shared(points: &[f64], degree: usize) -> Arc<Self> {
        Arc::new(Self::new(points, degree))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `T_0..T_degree` at point `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.degree + 1;
        &self.values[k * w..(k + 1) * w]
    }

    /// `sum_j c_j T_j(x_k)` for the first `c.len()` basis functions.
    pub fn eval_at(&self, k: usize, c: &[f64]) -> f64 {
        self.row(k).iter().zip(c).map(|(t, c)| t * c).sum()
    }
}

/// `T_0(x)..T_degree(x)`.
pub(crate) fn cheb_row(x: f64, degree: usize) -> Vec<f64> {
    let mut row = vec![0.0; degree + 1];
    row[0] = 1.0;
    if degree >= 1 {
        row[1] = x;
    }
    for j in 2..=degree {
        row[j] = 2.0 * x * row[j - 1] - row[j - 2];
    }
    row
}
