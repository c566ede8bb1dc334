//! Monic orthogonal polynomials defined by their Jacobi–Szegő parameters.
//!
//! A [`JacobiSzegoSequence`] holds the coefficients `(alpha_n, omega_n)` of
//! the recurrence
//!
//! ```text
//! x P_n(x) = P_{n+1}(x) + alpha_n P_n(x) + omega_n P_{n-1}(x),  P_{-1} = 0, P_0 = 1,
//! ```
//!
//! with the convention `omega_0 = 1`. Closed-form families are evaluated on
//! demand, so there is no degree cap for them; sequences recovered from a
//! quadrature rule are finite tables.

use crate::error::{Error, Result};
use crate::measures::QuadratureRule;

/// Highest degree accepted by the discrete Stieltjes procedure.
pub const STIELTJES_MAX_DEGREE: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// Monic Gegenbauer polynomials with parameter `mu`, dilated so that the
    /// orthogonality measure has unit variance (`x -> x / sqrt(2(1+mu))`).
    ScaledGegenbauer { mu: f64 },
    /// Monic Jacobi `(lambda - 1/2, lambda - 3/2)` polynomials moved to the
    /// standardized non-symmetric measure; `sign = -1` is the reflected law.
    ShiftedJacobi { lambda: f64, sign: f64 },
    /// Constant tail `(a, 1 + b)` after the standardized first row.
    FreeMeixner { a: f64, b: f64 },
    /// Classical monic Jacobi polynomials on `[-1, 1]`.
    Jacobi { alpha: f64, beta: f64 },
    /// Classical monic Gegenbauer polynomials on `[-1, 1]`.
    Gegenbauer { lambda: f64 },
    Table { alpha: Vec<f64>, omega: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSzegoSequence {
    kind: SequenceKind,
    standardized: bool,
}

impl JacobiSzegoSequence {
    pub fn scaled_gegenbauer(mu: f64) -> Self {
        JacobiSzegoSequence { kind: SequenceKind::ScaledGegenbauer { mu }, standardized: true }
    }

    pub fn shifted_jacobi(lambda: f64, sign: f64) -> Self {
        JacobiSzegoSequence {
            kind: SequenceKind::ShiftedJacobi { lambda, sign: sign.signum() },
            standardized: true,
        }
    }

    pub fn free_meixner(a: f64, b: f64) -> Self {
        JacobiSzegoSequence { kind: SequenceKind::FreeMeixner { a, b }, standardized: true }
    }

    pub fn classical_jacobi(alpha: f64, beta: f64) -> Self {
        JacobiSzegoSequence { kind: SequenceKind::Jacobi { alpha, beta }, standardized: false }
    }

    pub fn classical_gegenbauer(lambda: f64) -> Self {
        JacobiSzegoSequence { kind: SequenceKind::Gegenbauer { lambda }, standardized: false }
    }

    /// Wraps a finite table. `omega[0]` is forced to the convention value 1.
    pub fn from_table(alpha: Vec<f64>, mut omega: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != omega.len() {
            return Err(Error::InvalidInput(format!(
                "recurrence table needs equal non-empty lengths, got {} and {}",
                alpha.len(),
                omega.len()
            )));
        }
        omega[0] = 1.0;
        let standardized = alpha[0].abs() < 1e-12
            && omega.get(1).map_or(true, |w| (w - 1.0).abs() < 1e-12);
        Ok(JacobiSzegoSequence { kind: SequenceKind::Table { alpha, omega }, standardized })
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn standardized(&self) -> bool {
        self.standardized
    }

    /// Number of available indices, `None` for closed-form sequences.
    pub fn len(&self) -> Option<usize> {
        match &self.kind {
            SequenceKind::Table { alpha, .. } => Some(alpha.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `alpha_n`. Panics past the end of a finite table.
    pub fn alpha(&self, n: usize) -> f64 {
        match &self.kind {
            SequenceKind::ScaledGegenbauer { .. } | SequenceKind::Gegenbauer { .. } => 0.0,
            SequenceKind::ShiftedJacobi { lambda, sign } => {
                if n == 0 {
                    return 0.0;
                }
                let (l, nf) = (*lambda, n as f64);
                sign * nf * (nf + 2.0 * l - 1.0)
                    / ((nf + l - 1.0) * (nf + l) * (2.0 * l - 1.0).sqrt())
            }
            SequenceKind::FreeMeixner { a, .. } => {
                if n == 0 {
                    0.0
                } else {
                    *a
                }
            }
            SequenceKind::Jacobi { alpha, beta } => jacobi_alpha(*alpha, *beta, n),
            SequenceKind::Table { alpha, .. } => alpha[n],
        }
    }

    /// `omega_n`, with `omega_0 = 1`. Panics past the end of a finite table.
    pub fn omega(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        match &self.kind {
            SequenceKind::ScaledGegenbauer { mu } => {
                if n == 1 {
                    1.0
                } else {
                    2.0 * (1.0 + mu) * gegenbauer_omega(*mu, n)
                }
            }
            SequenceKind::Gegenbauer { lambda } => gegenbauer_omega(*lambda, n),
            SequenceKind::ShiftedJacobi { lambda, .. } => {
                if n == 1 {
                    return 1.0;
                }
                let (l, nf) = (*lambda, n as f64);
                l * l * nf * (nf + 2.0 * l - 2.0) / ((2.0 * l - 1.0) * (nf + l - 1.0).powi(2))
            }
            SequenceKind::FreeMeixner { b, .. } => {
                if n == 1 {
                    1.0
                } else {
                    1.0 + b
                }
            }
            SequenceKind::Jacobi { alpha, beta } => jacobi_omega(*alpha, *beta, n),
            SequenceKind::Table { omega, .. } => omega[n],
        }
    }

    fn check_range(&self, n_max: usize) -> Result<()> {
        match self.len() {
            Some(len) if n_max > len => Err(Error::Precondition(format!(
                "degree {n_max} needs recurrence coefficients up to index {}, table has {len}",
                n_max - 1
            ))),
            _ => Ok(()),
        }
    }
}

/// Monic Gegenbauer `omega_n` on `[-1, 1]` for `n >= 1`.
fn gegenbauer_omega(lambda: f64, n: usize) -> f64 {
    if n == 1 {
        return 1.0 / (2.0 * (1.0 + lambda));
    }
    let nf = n as f64;
    nf * (nf + 2.0 * lambda - 1.0) / (4.0 * (nf + lambda) * (nf + lambda - 1.0))
}

fn jacobi_alpha(a: f64, b: f64, n: usize) -> f64 {
    if n == 0 {
        return (b - a) / (a + b + 2.0);
    }
    let s = 2.0 * n as f64 + a + b;
    (b * b - a * a) / (s * (s + 2.0))
}

fn jacobi_omega(a: f64, b: f64, n: usize) -> f64 {
    if n == 1 {
        return 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b));
    }
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
}

/// Values `P_0(x), ..., P_max_degree(x)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialValueTable {
    pub values: Vec<f64>,
    pub x: f64,
    pub max_degree: usize,
}

impl PolynomialValueTable {
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

/// Evaluates `P_0..P_{n_max}` at `x` by the three-term recurrence.
pub fn eval_monic(seq: &JacobiSzegoSequence, n_max: usize, x: f64) -> Result<PolynomialValueTable> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("evaluation point must be finite, got {x}")));
    }
    seq.check_range(n_max)?;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..n_max {
        let next = (x - seq.alpha(n)) * cur - seq.omega(n) * prev;
        values.push(next);
        prev = cur;
        cur = next;
    }
    Ok(PolynomialValueTable { values, x, max_degree: n_max })
}

/// `||P_n||^2 = omega_0 omega_1 ... omega_n` (with `omega_0 = 1`), which
/// follows from `<x P_n, P_{n-1}> = omega_n ||P_{n-1}||^2 = ||P_n||^2`.
pub fn norm_squared(seq: &JacobiSzegoSequence, n: usize) -> f64 {
    (0..=n).map(|k| seq.omega(k)).product()
}

/// Recovers `(alpha_n, omega_n)` for `n <= n_max` from a discrete measure by
/// the Stieltjes procedure.
pub fn stieltjes_from_quadrature(rule: &QuadratureRule, n_max: usize) -> Result<JacobiSzegoSequence> {
    let m = rule.nodes.len();
    if n_max > STIELTJES_MAX_DEGREE {
        return Err(Error::Precondition(format!(
            "degree {n_max} exceeds the supported maximum {STIELTJES_MAX_DEGREE}"
        )));
    }
    if m < 2 * n_max + 1 {
        return Err(Error::Precondition(format!(
            "rule has {m} nodes, at least {} needed for degree {n_max}",
            2 * n_max + 1
        )));
    }
    if let Some(w) = rule.weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Precondition(format!("quadrature weight {w} is not positive")));
    }
    let total: f64 = rule.weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("weights sum to {total}, expected 1")));
    }

    let mut alpha = Vec::with_capacity(n_max + 1);
    let mut omega = Vec::with_capacity(n_max + 1);
    let mut prev = vec![0.0; m];
    let mut cur = vec![1.0; m];
    let mut prev_norm = 1.0;
    for n in 0..=n_max {
        let norm: f64 = rule.weights.iter().zip(&cur).map(|(w, p)| w * p * p).sum();
        let first: f64 = rule
            .weights
            .iter()
            .zip(&cur)
            .zip(&rule.nodes)
            .map(|((w, p), x)| w * x * p * p)
            .sum();
        let w_n = if n == 0 { 1.0 } else { norm / prev_norm };
        if !(w_n > 0.0) || !w_n.is_finite() || !(norm > 0.0) {
            return Err(Error::NumericalBreakdown {
                index: n,
                detail: format!("omega_{n} = {w_n:e} lost positivity (squared norm {norm:e})"),
            });
        }
        let a_n = first / norm;
        alpha.push(a_n);
        omega.push(w_n);
        let next: Vec<f64> = rule
            .nodes
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(x, (p, q))| (x - a_n) * p - w_n * q)
            .collect();
        prev = std::mem::replace(&mut cur, next);
        prev_norm = norm;
    }
    omega[0] = 1.0;
    JacobiSzegoSequence::from_table(alpha, omega)
}
