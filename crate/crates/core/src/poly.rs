//! Dense real polynomials with ascending coefficients.
//!
//! Only what the coefficient-matching code needs: ring operations, evaluation,
//! derivatives, deflation by a known root and a sign-aware quadratic solver.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::new(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c z^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// Coefficient of `z^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Length of the coefficient array minus one; trailing zeros are kept.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree ignoring trailing exact zeros (the zero polynomial has degree 0).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect::<Vec<_>>())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect::<Vec<_>>(),
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Synthetic division by `(z - root)`; returns quotient and remainder.
    pub fn deflate(&self, root: f64) -> (Poly, f64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Poly::zero(), self.coeffs[0]);
        }
        let mut quotient = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (0..n).rev() {
            let value = self.coeffs[k] + carry * root;
            if k == 0 {
                return (Poly::new(quotient), value);
            }
            quotient[k - 1] = value;
            carry = value;
        }
        unreachable!()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect::<Vec<_>>())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect::<Vec<_>>())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// Real roots of `c0 + c1 x + c2 x^2`, using the cancellation-free form.
///
/// Returns `None` when the discriminant is negative or the polynomial is
/// identically zero. A vanishing leading coefficient degrades to the linear
/// root (returned twice is avoided: the single root comes back alone).
pub fn quadratic_real_roots(c0: f64, c1: f64, c2: f64) -> Option<Vec<f64>> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return None;
        }
        return Some(vec![-c0 / c1]);
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (c1 + c1.signum_or_one() * disc.sqrt());
    if q == 0.0 {
        return Some(vec![0.0, 0.0]);
    }
    let mut roots = vec![q / c2, c0 / q];
    roots.sort_by(|a, b| a.total_cmp(b));
    Some(roots)
}

/// Complex roots of `c0 + c1 z + c2 z^2` (one root when `c2 == 0`, none for a
/// constant).
pub fn quadratic_complex_roots(c0: f64, c1: f64, c2: f64) -> Vec<Complex64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![Complex64::new(-c0 / c1, 0.0)];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc >= 0.0 {
        quadratic_real_roots(c0, c1, c2)
            .unwrap_or_default()
            .into_iter()
            .map(|r| Complex64::new(r, 0.0))
            .collect()
    } else {
        let re = -c1 / (2.0 * c2);
        let im = (-disc).sqrt() / (2.0 * c2.abs());
        vec![Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}
