//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Endpoint logarithmic or square-root singularities are handled by the
//! substitution `x = a + (b - a) t^2`, which turns `log(x - a)` into
//! `2 log t + const` weighted by `t` and makes the integrand continuous.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Which endpoints carry an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singular {
    None,
    Left,
    Right,
    Both,
}

/// One 21-point Kronrod panel: `(value, error estimate)` as in QUADPACK.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// `int_a^b f` to `max(tol.abs, tol.rel * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_points(f, &[a, b], tol)
}

/// Integral over `[points[0], points[last]]` with the inner points as
/// initial breaks (kinks, discontinuities).
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<Estimate> {
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("integration needs two or more finite breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (v, e) = gk21(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut count = heap.len();
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::numeric("integrand produced a non-finite value"));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b))
            || (p.b - p.a).abs() <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(1e-300)
        {
            // Too narrow to split further: its error stays in the total.
            settled.push(p);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if count >= MAX_INTERVALS {
            return Err(Error::numeric(format!(
                "quadrature did not converge on [{}, {}]: error {error:.3e} after {count} intervals",
                points[0],
                points[points.len() - 1]
            )));
        }
        let (v1, e1) = gk21(&f, p.a, mid);
        let (v2, e2) = gk21(&f, mid, p.b);
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
        count += 1;
    }
    // Re-sum to shed the drift of the running updates.
    let all = heap.iter().chain(&settled);
    let value = all.clone().map(|p| p.value).sum();
    let error: f64 = all.map(|p| p.error).sum();
    if error > tol.abs.max(tol.rel * f64::abs(value)) {
        return Err(Error::numeric(format!(
            "quadrature stalled at error {error:.3e} (requested {:.1e})",
            tol.abs.max(tol.rel * f64::abs(value))
        )));
    }
    Ok(Estimate {
        value,
        error,
        intervals: count,
    })
}

/// Integral of `f(x, dist)` over `[a, b]` where `dist` is the distance from
/// `x` to the nearer singular endpoint, computed without cancellation.
pub fn integrate_singular<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    sing: Singular,
    tol: Tolerance,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, intervals: 0 });
    }
    if a > b {
        let sing = mirror(sing);
        return singular_panels(&f, b, a, sing, tol).map(|e| Estimate { value: -e.value, ..e });
    }
    singular_panels(&f, a, b, sing, tol)
}

fn singular_panels<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    sing: Singular,
    tol: Tolerance,
) -> Result<Estimate> {
    match sing {
        Singular::None => integrate(|x| f(x, f64::NAN), a, b, tol),
        Singular::Left | Singular::Right => one_sided(f, a, b, sing == Singular::Left, tol),
        Singular::Both => {
            let m = a + 0.5 * (b - a);
            let half = Tolerance::new(0.5 * tol.abs, tol.rel);
            let l = one_sided(f, a, m, true, half)?;
            let r = one_sided(f, m, b, false, half)?;
            Ok(Estimate {
                value: l.value + r.value,
                error: l.error + r.error,
                intervals: l.intervals + r.intervals,
            })
        }
    }
}

/// `x = a + w t^2` (left) or `x = b - w t^2` (right).
fn one_sided<F: Fn(f64, f64) -> f64>(f: &F, a: f64, b: f64, left: bool, tol: Tolerance) -> Result<Estimate> {
    let w = b - a;
    integrate(
        |t| {
            let d = w * t * t;
            let x = if left { a + d } else { b - d };
            2.0 * w * t * f(x, d)
        },
        0.0,
        1.0,
        tol,
    )
}

fn mirror(s: Singular) -> Singular {
    match s {
        Singular::Left => Singular::Right,
        Singular::Right => Singular::Left,
        other => other,
    }
}
