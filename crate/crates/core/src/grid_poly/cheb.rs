use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficients below this fraction of the largest one do not count towards
/// the reported degree.
pub const TRUNCATION_TOL: f64 = 1e-13;

/// A polynomial `sum_j c_j T_j(x)` in the Chebyshev basis of the first kind.
///
/// Serialized as `{"basis":"chebyshev","coeffs":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChebPolyRepr", into = "ChebPolyRepr")]
pub struct ChebPoly {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChebPolyRepr {
    basis: String,
    coeffs: Vec<f64>,
}

impl TryFrom<ChebPolyRepr> for ChebPoly {
    type Error = String;

    fn try_from(repr: ChebPolyRepr) -> Result<Self, String> {
        if repr.basis != "chebyshev" {
            return Err(format!("unsupported basis {:?}", repr.basis));
        }
        if repr.coeffs.iter().any(|c| !c.is_finite()) {
            return Err("coefficients must be finite".into());
        }
        Ok(ChebPoly::new(repr.coeffs))
    }
}

impl From<ChebPoly> for ChebPolyRepr {
    fn from(p: ChebPoly) -> Self {
        ChebPolyRepr {
            basis: "chebyshev".into(),
            coeffs: p.coeffs,
        }
    }
}

impl ChebPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        ChebPoly { coeffs }
    }

    pub fn zero() -> Self {
        ChebPoly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        ChebPoly { coeffs: vec![c] }
    }

    /// `T_k`.
    pub fn basis(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebPoly { coeffs }
    }

    /// `2^(1-d) T_d`, the monic polynomial of degree `d` with the smallest
    /// maximum on `[-1, 1]`.
    pub fn monic_chebyshev(d: usize) -> Self {
        let mut p = Self::basis(d);
        if d >= 1 {
            p.coeffs[d] = 2f64.powi(1 - d as i32);
        }
        p
    }

    /// Converts monomial coefficients `a_0 + a_1 x + ... + a_d x^d`.
    pub fn from_monomial(a: &[f64]) -> Self {
        // Horner in the Chebyshev basis: p <- x p + a_k.
        let mut p = ChebPoly::zero();
        for &ak in a.iter().rev() {
            p = p.mul_x();
            p.coeffs[0] += ak;
        }
        p
    }

    /// `leading * prod (x - r)`, by interpolating the product at `d + 1`
    /// Chebyshev points. Expanding factor by factor loses accuracy once the
    /// partial products grow.
    pub fn from_roots(leading: f64, roots: &[f64]) -> Self {
        Self::interpolate(|x| leading * roots.iter().map(|r| x - r).product::<f64>(), roots.len())
    }

    /// Interpolant of degree `d` at the Chebyshev points of the first kind.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, d: usize) -> Self {
        let m = d + 1;
        let theta: Vec<f64> = (0..m)
            .map(|k| std::f64::consts::PI * (k as f64 + 0.5) / m as f64)
            .collect();
        let vals: Vec<f64> = theta.iter().map(|t| f(t.cos())).collect();
        let coeffs = (0..m)
            .map(|j| {
                let s: f64 = theta
                    .iter()
                    .zip(&vals)
                    .map(|(t, v)| v * (j as f64 * t).cos())
                    .sum();
                let w = if j == 0 { 1.0 } else { 2.0 };
                w * s / m as f64
            })
            .collect();
        ChebPoly { coeffs }
    }

    /// Multiplication by `x`, using `x T_0 = T_1` and `x T_j = (T_{j+1} + T_{j-1}) / 2`.
    pub fn mul_x(&self) -> Self {
        let m = self.coeffs.len();
        let mut out = vec![0.0; m + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j == 0 {
                out[1] += c;
            } else {
                out[j + 1] += 0.5 * c;
                out[j - 1] += 0.5 * c;
            }
        }
        ChebPoly { coeffs: out }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Index of the last coefficient above `TRUNCATION_TOL * max |c|`; zero for
    /// the zero polynomial.
    pub fn degree(&self) -> usize {
        let cutoff = TRUNCATION_TOL * self.max_abs_coeff();
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > cutoff)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Drops coefficients above the reported degree.
    pub fn truncated(&self) -> Self {
        ChebPoly {
            coeffs: self.coeffs[..=self.degree()].to_vec(),
        }
    }

    /// Coefficient of `x^d` in the monomial expansion, `d` the stored length - 1.
    pub fn leading_monomial_coeff(&self) -> f64 {
        let d = self.coeffs.len() - 1;
        let c = self.coeffs[d];
        if d == 0 {
            c
        } else {
            c * 2f64.powi(d as i32 - 1)
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        ChebPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &ChebPoly) -> Self {
        let m = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..m)
            .map(|j| self.coeffs.get(j).unwrap_or(&0.0) + other.coeffs.get(j).unwrap_or(&0.0))
            .collect();
        ChebPoly { coeffs }
    }

    /// Clenshaw recurrence, with Reinsch's modification for `0.5 <= |x| <= 1.5`
    /// where the plain recurrence loses `O(d^2)` ulps. Valid for any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        if c.len() > 2 && (0.5..=1.5).contains(&x.abs()) {
            return self.eval_reinsch(x);
        }
        let (mut b1, mut b2) = (0.0, 0.0);
        let two_x = 2.0 * x;
        for &ck in c[1..].iter().rev() {
            let b0 = ck + two_x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + x * b1 - b2
    }

    /// Recurrence on `d_k = b_k -+ b_{k+1}` with the small multiplier `2(x -+ 1)`.
    fn eval_reinsch(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        let s = if x >= 0.0 { 1.0 } else { -1.0 };
        let u = 2.0 * (x - s);
        let (mut b, mut d) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            d = ck + u * b + s * d;
            b = d + s * b;
        }
        c[0] + 0.5 * u * b + s * d
    }

    /// `sum |c_j T_j(x)|`, the rounding scale of evaluating at `x`.
    pub fn abs_term_sum(&self, x: f64) -> f64 {
        let (mut t0, mut t1) = (1.0f64, x);
        let mut s = self.coeffs[0].abs();
        for (j, &cj) in self.coeffs.iter().enumerate().skip(1) {
            if j > 1 {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            s += cj.abs() * t1.abs();
        }
        s
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebPoly::zero();
        }
        let mut d = vec![0.0; n - 1];
        // c'_{k-1} = c'_{k+1} + 2k c_k
        for k in (1..n).rev() {
            let next = if k + 1 < n - 1 { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        ChebPoly { coeffs: d }
    }

    /// `log |p(x)|` and the sign of `p(x)`.
    pub fn eval_log_abs(&self, x: f64) -> LogAbs {
        LogAbs::from_value(self.eval(x))
    }
}

pub fn eval(p: &ChebPoly, x: f64) -> f64 {
    p.eval(x)
}

/// `log |p(x)|` with its sign; a zero value has sign 0 and magnitude `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogAbs {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogAbs {
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            LogAbs {
                log_magnitude: f64::NEG_INFINITY,
                sign: 0,
            }
        } else {
            LogAbs {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }
}

/// A polynomial given by its leading coefficient and all of its real roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootProduct {
    pub leading: f64,
    pub roots: Vec<f64>,
}

impl RootProduct {
    pub fn new(leading: f64, roots: Vec<f64>) -> Self {
        RootProduct { leading, roots }
    }

    pub fn monic(roots: Vec<f64>) -> Self {
        RootProduct { leading: 1.0, roots }
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Sum of `log |x - root|` terms; never forms the product.
    pub fn eval_log_abs(&self, x: f64) -> LogAbs {
        if self.leading == 0.0 {
            return LogAbs::from_value(0.0);
        }
        let mut log_mag = self.leading.abs().ln();
        let mut negative = self.leading < 0.0;
        for &r in &self.roots {
            let t = x - r;
            if t == 0.0 {
                return LogAbs::from_value(0.0);
            }
            log_mag += t.abs().ln();
            negative ^= t < 0.0;
        }
        LogAbs {
            log_magnitude: log_mag,
            sign: if negative { -1 } else { 1 },
        }
    }

    pub fn to_cheb(&self) -> ChebPoly {
        ChebPoly::from_roots(self.leading, &self.roots)
    }
}

/// Either representation of a polynomial for log-magnitude evaluation.
pub fn eval_log_abs<P: LogEval + ?Sized>(p: &P, x: f64) -> LogAbs {
    p.log_abs_at(x)
}

pub trait LogEval {
    fn log_abs_at(&self, x: f64) -> LogAbs;
}

impl LogEval for ChebPoly {
    fn log_abs_at(&self, x: f64) -> LogAbs {
        self.eval_log_abs(x)
    }
}

impl LogEval for RootProduct {
    fn log_abs_at(&self, x: f64) -> LogAbs {
        self.eval_log_abs(x)
    }
}

impl std::str::FromStr for ChebPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad polynomial JSON: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_sum(c: &[f64], x: f64) -> f64 {
        // T_j(x) by the three-term recurrence, summed term by term.
        let (mut t0, mut t1) = (1.0, x);
        let mut s = c[0];
        for (j, &cj) in c.iter().enumerate().skip(1) {
            if j > 1 {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            s += cj * t1;
        }
        s
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ChebPoly::new(vec![0.0, 0.0, 1.0]).eval(0.5), -0.5);
        assert_eq!(ChebPoly::new(vec![0.0, 0.0, 0.0]).eval(0.3), 0.0);
        assert_eq!(ChebPoly::new(vec![1.0, 1.0]).eval(-1.0), 0.0);
        // outside [-1, 1]: T_2(3) = 17
        assert_eq!(ChebPoly::basis(2).eval(3.0), 17.0);
    }

    #[test]
    fn endpoint_values_are_sums() {
        // p(1) = sum c_j and p(-1) = sum (-1)^j c_j; the sums of small
        // integers are exact, so any rounding comes from the recurrence.
        let c: Vec<f64> = (0..161).map(|j| ((j * 37) % 11) as f64 - 5.0).collect();
        let p = ChebPoly::new(c.clone());
        let plus: f64 = c.iter().sum();
        let minus: f64 = c.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -v }).sum();
        assert_eq!(p.eval(1.0), plus);
        assert_eq!(p.eval(-1.0), minus);
        assert_eq!(ChebPoly::basis(80).eval(-1.0), 1.0);
        assert_eq!(ChebPoly::basis(81).eval(-1.0), -1.0);
        // T_3(0.75) = 4 (0.75)^3 - 3 (0.75)
        assert!((ChebPoly::basis(3).eval(0.75) - (4.0 * 0.421875 - 2.25)).abs() < 1e-15);
        assert!((ChebPoly::basis(3).eval(-1.2) - (4.0 * -1.728 + 3.6)).abs() < 1e-14);
    }

    #[test]
    fn monomial_and_roots_conversions() {
        // x^2 - 1/2 = T_2 / 2
        let p = ChebPoly::from_monomial(&[-0.5, 0.0, 1.0]);
        assert!((p.coeffs()[0]).abs() < 1e-15);
        assert!((p.coeffs()[2] - 0.5).abs() < 1e-15);
        let q = ChebPoly::from_roots(1.0, &[0.3, -0.7]);
        for x in [-1.0, -0.2, 0.4, 2.0] {
            assert!((q.eval(x) - (x - 0.3) * (x + 0.7)).abs() < 1e-14);
        }
        assert_eq!(ChebPoly::monic_chebyshev(5).leading_monomial_coeff(), 1.0);
    }

    #[test]
    fn degree_truncation() {
        assert_eq!(ChebPoly::new(vec![1.0, 2.0, 1e-14]).degree(), 1);
        assert_eq!(ChebPoly::new(vec![1.0, 2.0, 1e-12]).degree(), 2);
        assert_eq!(ChebPoly::zero().degree(), 0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ChebPoly::new(vec![0.3, -1.2, 0.7, 0.25, -0.4, 0.1]);
        let dp = p.derivative();
        for x in [-0.9, -0.1, 0.35, 0.8] {
            let h = 1e-6;
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            assert!((dp.eval(x) - fd).abs() < 1e-7, "{x}");
        }
    }

    #[test]
    fn log_abs_root_product() {
        let p = RootProduct::monic(vec![-1.0, 1.0]);
        let v = p.eval_log_abs(3.0);
        assert!((v.log_magnitude - 8f64.ln()).abs() < 1e-15);
        assert_eq!(v.sign, 1);
        let z = RootProduct::monic(vec![0.0]).eval_log_abs(0.0);
        assert_eq!(z.sign, 0);
        assert_eq!(z.log_magnitude, f64::NEG_INFINITY);
        // 1.5 * 1 * 0.5
        let w = RootProduct::monic(vec![-0.5, 0.0, 0.5]).eval_log_abs(1.0);
        assert!((w.log_magnitude - 0.75f64.ln()).abs() < 4.0 * f64::EPSILON);
        assert_eq!(w.sign, 1);
        let neg = RootProduct::monic(vec![-0.5, 0.0, 0.5]).eval_log_abs(0.25);
        assert_eq!(neg.sign, -1);
    }

    #[test]
    fn json_shape() {
        let p = ChebPoly::new(vec![0.1, -2.5e-300, 3.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with(r#"{"basis":"chebyshev","coeffs":["#));
        let q: ChebPoly = s.parse().unwrap();
        assert_eq!(p, q);
        assert!(r#"{"basis":"monomial","coeffs":[1]}"#.parse::<ChebPoly>().is_err());
    }

    proptest! {
        #[test]
        fn clenshaw_matches_direct_sum(
            c in prop::collection::vec(-1.0f64..1.0, 1..65),
            x in -1.0f64..1.0,
        ) {
            let p = ChebPoly::new(c.clone());
            let fast = p.eval(x);
            let slow = direct_sum(&c, x);
            let scale: f64 = c.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
            prop_assert!((fast - slow).abs() <= 1e-12 * scale.max(slow.abs()));
        }

        #[test]
        fn json_round_trip_is_bit_exact(c in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
            let p = ChebPoly::new(c);
            let s = crate::json::to_string(&p).unwrap();
            let q: ChebPoly = s.parse().unwrap();
            prop_assert_eq!(
                p.coeffs().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                q.coeffs().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }

        #[test]
        fn log_form_agrees_with_expanded(roots in prop::collection::vec(-1.0f64..1.0, 1..25), x in -1.2f64..1.2) {
            let rp = RootProduct::monic(roots.clone());
            let expanded = rp.to_cheb().eval(x);
            prop_assume!(expanded.abs() > 1e-250);
            // The expanded value is only trustworthy when it is not swamped by
            // rounding in the coefficient sum.
            let scale = rp.to_cheb().abs_term_sum(x);
            prop_assume!(expanded.abs() > 1e-6 * scale);
            let lhs = rp.eval_log_abs(x).log_magnitude;
            prop_assert!((lhs - expanded.abs().ln()).abs() < 1e-8);
        }
    }
}
