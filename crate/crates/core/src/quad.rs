//! Numerical integration plumbing: Gauss–Legendre nodes, adaptive
//! Gauss–Kronrod (7/15) integration and affine Beta weights.
//!
//! Beta weights `(1 - y)^p (1 + y)^q` on `y in [-1, 1]` are integrated in two
//! halves. On a half whose endpoint exponent is negative the substitution
//! `1 ± y = s^(1/(e+1))` turns the weight into a constant, which removes the
//! singularity exactly; otherwise the half is integrated directly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7/K15 integration of `f` over `[a, b]`.
///
/// Stops once the summed error estimate is below `tol * max(1, |I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    while total_err > tol * total.abs().max(1.0) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Integration(format!(
                "error estimate {total_err:e} after {MAX_INTERVALS} subintervals on [{a}, {b}]"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(Segment { err: 0.0, ..worst });
            total_err = heap.iter().map(|s| s.err).sum();
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
        total = heap.iter().map(|s| s.value).sum();
        total_err = heap.iter().map(|s| s.err).sum();
    }
    if !total.is_finite() {
        return Err(Error::Integration(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(total)
}

/// The weight `(1 - y)^upper (1 + y)^lower` with `y = (x - mid) / half`,
/// unnormalized, on the interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWeight {
    pub lo: f64,
    pub hi: f64,
    /// Exponent at the upper endpoint.
    pub upper: f64,
    /// Exponent at the lower endpoint.
    pub lower: f64,
}

/// One half of the interval parametrised by `t in [0, 1]`, with `t = 0` at
/// the endpoint. `point(t)` returns `(x, weight * jacobian)`.
struct HalfMap {
    from_lower: bool,
    exponent: f64,
    other: f64,
    substituted: bool,
}

impl BetaWeight {
    pub fn new(lo: f64, hi: f64, upper: f64, lower: f64) -> Self {
        BetaWeight { lo, hi, upper, lower }
    }

    fn half(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - 0.5 * (self.lo + self.hi)) / self.half()
    }

    /// Unnormalized log-weight; `-inf` outside the open interval.
    pub fn log_weight(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return f64::NEG_INFINITY;
        }
        let h = self.half();
        let one_plus = (x - self.lo) / h;
        let one_minus = (self.hi - x) / h;
        self.upper * one_minus.ln() + self.lower * one_plus.ln()
    }

    pub fn weight(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let h = self.half();
        let one_plus = (x - self.lo) / h;
        let one_minus = (self.hi - x) / h;
        one_minus.powf(self.upper) * one_plus.powf(self.lower)
    }

    fn halves(&self) -> [HalfMap; 2] {
        [
            HalfMap {
                from_lower: true,
                exponent: self.lower,
                other: self.upper,
                substituted: self.lower < 0.0,
            },
            HalfMap {
                from_lower: false,
                exponent: self.upper,
                other: self.lower,
                substituted: self.upper < 0.0,
            },
        ]
    }

    fn point(&self, map: &HalfMap, t: f64) -> (f64, f64) {
        let h = self.half();
        // d = distance from the endpoint in y units, in [0, 1].
        let (d, jac_weight) = if map.substituted {
            let r = map.exponent + 1.0;
            (t.powf(1.0 / r), 1.0 / r)
        } else {
            (t, t.powf(map.exponent))
        };
        let other_factor = (2.0 - d).powf(map.other);
        let x = if map.from_lower { self.lo + h * d } else { self.hi - h * d };
        (x, h * jac_weight * other_factor)
    }

    /// `∫ g(x) w(x) dx` by adaptive integration to relative tolerance `tol`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for map in self.halves() {
            total += integrate_adaptive(
                |t| {
                    let (x, w) = self.point(&map, t);
                    g(x) * w
                },
                0.0,
                1.0,
                tol,
            )?;
        }
        Ok(total)
    }

    /// A fixed discretization of the weight: composite Gauss–Legendre on
    /// panels graded geometrically towards both endpoints.
    pub fn discretize(&self, nodes_per_panel: usize, graded_panels: usize) -> (Vec<f64>, Vec<f64>) {
        let (gx, gw) = gauss_legendre(nodes_per_panel);
        let ratio: f64 = 0.2;
        let mut breaks = vec![0.0];
        for k in (0..graded_panels).rev() {
            breaks.push(ratio.powi(k as i32 + 1));
        }
        breaks.push(1.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for map in self.halves() {
            // panels are graded in the distance to the endpoint, then mapped
            // to the integration variable
            let breaks: Vec<f64> = if map.substituted {
                breaks.iter().map(|d| d.powf(map.exponent + 1.0)).collect()
            } else {
                breaks.clone()
            };
            for pair in breaks.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let c = 0.5 * (a + b);
                let hw = 0.5 * (b - a);
                for (xi, wi) in gx.iter().zip(&gw) {
                    let (x, w) = self.point(&map, c + hw * xi);
                    nodes.push(x);
                    weights.push(w * wi * hw);
                }
            }
        }
        (nodes, weights)
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`), together with the
/// squared first components of the unit eigenvectors. Implicit QL with
/// Wilkinson shifts, rotating only the first row of the eigenvector matrix.
/// Returns `None` if some eigenvalue needs more than 60 sweeps.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Some((d, z.iter().map(|v| v * v).collect()))
}
