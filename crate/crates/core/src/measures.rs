//! Catalog of the classified probability measures.
//!
//! Every measure is standardized (mean 0, variance 1). The four classification
//! families are affine images of Beta laws and carry a density; the free
//! Meixner family is described by its recurrence only, with any atoms located
//! from the closed-form Cauchy transform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{tridiagonal_eigen, BetaWeight};
use crate::recurrence::JacobiSzegoSequence;

/// Smallest `lambda` accepted for families that need `lambda > 1/2`.
pub const LAMBDA_GUARD: f64 = 0.51;
/// Half-width of the excluded band around `lambda = 1`.
pub const LAMBDA_ONE_BAND: f64 = 1e-6;
/// Tolerance of the adaptive integration behind normalization constants.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Sym1,
    Sym2,
    NonSymPlus,
    NonSymMinus,
    FreeMeixner,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Sym1,
        Family::Sym2,
        Family::NonSymPlus,
        Family::NonSymMinus,
        Family::FreeMeixner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sym1 => "sym1",
            Family::Sym2 => "sym2",
            Family::NonSymPlus => "nonsym-plus",
            Family::NonSymMinus => "nonsym-minus",
            Family::FreeMeixner => "free-meixner",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Family::Sym1 | Family::Sym2)
    }

    /// `+1` / `-1` for the non-symmetric pair, `0` otherwise.
    pub fn sign(self) -> f64 {
        match self {
            Family::NonSymPlus => 1.0,
            Family::NonSymMinus => -1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown family '{s}'")))
    }
}

/// Validated family parameters. `a` and `b` are zero outside the free
/// Meixner family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family: Family,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

impl FamilyParams {
    pub fn new(family: Family, lambda: f64, a: Option<f64>, b: Option<f64>) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Parameter(format!("lambda must be finite, got {lambda}")));
        }
        match family {
            Family::FreeMeixner => {
                if (lambda - 1.0).abs() > 1e-12 {
                    return Err(Error::Parameter(format!(
                        "the free Meixner family has lambda = 1, got {lambda}"
                    )));
                }
                let (a, b) = (a.unwrap_or(0.0), b.unwrap_or(0.0));
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Parameter("a and b must be finite".into()));
                }
                if b < -1.0 {
                    return Err(Error::Parameter(format!("b must be >= -1, got {b}")));
                }
                Ok(FamilyParams { family, lambda: 1.0, a, b })
            }
            _ => {
                if a.is_some() || b.is_some() {
                    return Err(Error::Parameter(format!(
                        "a and b only apply to the free Meixner family, not {family}"
                    )));
                }
                if lambda <= 0.0 {
                    return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
                }
                if family != Family::Sym1 && lambda <= 0.5 {
                    return Err(Error::Parameter(format!(
                        "lambda must be > 1/2 for {family}, got {lambda}"
                    )));
                }
                if family != Family::Sym1 && lambda < LAMBDA_GUARD {
                    return Err(Error::Parameter(format!(
                        "lambda must be >= {LAMBDA_GUARD} for {family} (quadrature guard band), got {lambda}"
                    )));
                }
                if (lambda - 1.0).abs() < LAMBDA_ONE_BAND {
                    return Err(Error::Redirect(format!(
                        "lambda = 1 is the degenerate case of {family}; use the free-meixner family"
                    )));
                }
                Ok(FamilyParams { family, lambda, a: 0.0, b: 0.0 })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `n >= 2` equally spaced points including both endpoints.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub params: FamilyParams,
    pub support: Interval,
    /// Unnormalized Beta weight; `None` for the free Meixner family.
    pub weight: Option<BetaWeight>,
    /// `1 / ∫ weight`, so that `density = norm_const * weight`. Set to 1 for
    /// the free Meixner family, whose density is not represented.
    pub norm_const: f64,
    /// Point masses (free Meixner only).
    pub atoms: Vec<Atom>,
}

impl MeasureSpec {
    pub fn family(&self) -> Family {
        self.params.family
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    /// Unnormalized log-density, if the family has one.
    pub fn log_density(&self, x: f64) -> Option<f64> {
        self.weight.map(|w| w.log_weight(x))
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        self.weight.map(|w| self.norm_const * w.weight(x))
    }

    /// `∫ g dμ` by adaptive integration against the density.
    pub fn integrate_density<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<f64> {
        let w = self.weight.ok_or_else(|| {
            Error::InvalidInput(format!("{} has no density representation", self.family()))
        })?;
        Ok(self.norm_const * w.integrate(g, tol)?)
    }
}

/// Builds a normalized measure from the catalog.
pub fn build_measure(family: Family, lambda: f64, a: Option<f64>, b: Option<f64>) -> Result<MeasureSpec> {
    let params = FamilyParams::new(family, lambda, a, b)?;
    measure_from_params(params)
}

pub fn measure_from_params(params: FamilyParams) -> Result<MeasureSpec> {
    match beta_weight_of(&params) {
        Some(w) => {
            let mass = w.integrate(|_| 1.0, NORMALIZATION_TOL)?;
            Ok(MeasureSpec {
                params,
                support: Interval { lo: w.lo, hi: w.hi },
                weight: Some(w),
                norm_const: 1.0 / mass,
                atoms: Vec::new(),
            })
        }
        None => {
            let (support, atoms) = free_meixner_support(params.a, params.b);
            Ok(MeasureSpec { params, support, weight: None, norm_const: 1.0, atoms })
        }
    }
}

/// The unnormalized Beta weight of a classification family.
fn beta_weight_of(params: &FamilyParams) -> Option<BetaWeight> {
    let l = params.lambda;
    match params.family {
        Family::Sym1 => {
            let r = (2.0 * (1.0 + l)).sqrt();
            Some(BetaWeight::new(-r, r, l - 0.5, l - 0.5))
        }
        Family::Sym2 => {
            let r = (2.0 * l).sqrt();
            Some(BetaWeight::new(-r, r, l - 1.5, l - 1.5))
        }
        Family::NonSymPlus => {
            let s = (2.0 * l - 1.0).sqrt();
            Some(BetaWeight::new((1.0 - 2.0 * l) / s, (1.0 + 2.0 * l) / s, l - 0.5, l - 1.5))
        }
        Family::NonSymMinus => {
            let s = (2.0 * l - 1.0).sqrt();
            Some(BetaWeight::new(-(1.0 + 2.0 * l) / s, (2.0 * l - 1.0) / s, l - 1.5, l - 0.5))
        }
        Family::FreeMeixner => None,
    }
}

/// Support interval (hull of the support for laws with atoms), without
/// computing the normalization.
pub fn support_of(params: &FamilyParams) -> Interval {
    match beta_weight_of(params) {
        Some(w) => Interval { lo: w.lo, hi: w.hi },
        None => free_meixner_support(params.a, params.b).0,
    }
}

/// Support hull and atoms of the free Meixner law with tail `(a, 1 + b)`.
///
/// The Cauchy transform is `G(x) = 1 / (x - T(x))` with `T` the transform of
/// the constant-coefficient tail; atoms sit at real zeros of `x - T(x)`
/// outside the absolutely continuous band `|x - a| <= 2 sqrt(1 + b)`. Those
/// zeros are roots of `b x^2 + a x + 1`.
pub fn free_meixner_support(a: f64, b: f64) -> (Interval, Vec<Atom>) {
    let c = 1.0 + b;
    if c == 0.0 {
        // Two-point law: G(x) = (x - a) / (x^2 - a x - 1).
        let d = (a * a + 4.0).sqrt();
        let roots = [0.5 * (a - d), 0.5 * (a + d)];
        let atoms: Vec<Atom> = roots
            .iter()
            .map(|&r| Atom { location: r, mass: (r - a) / (2.0 * r - a) })
            .collect();
        return (Interval { lo: roots[0], hi: roots[1] }, atoms);
    }
    let band = 2.0 * c.sqrt();
    let tail = |x: f64| {
        let d = x - a;
        let root = (d * d - 4.0 * c).sqrt();
        let t = (d - d.signum() * root) / (2.0 * c);
        let dt = (1.0 - d.abs() / root) / (2.0 * c);
        (t, dt)
    };
    let candidates = crate::poly::quadratic_real_roots(1.0, a, b).unwrap_or_default();
    let mut atoms: Vec<Atom> = candidates
        .into_iter()
        .filter(|&r| (r - a).abs() > band * (1.0 + 1e-12))
        .filter_map(|r| {
            let (t, dt) = tail(r);
            ((t - r).abs() <= 1e-10 * r.abs().max(1.0)).then(|| Atom { location: r, mass: 1.0 / (1.0 - dt) })
        })
        .collect();
    atoms.sort_by(|p, q| p.location.total_cmp(&q.location));
    atoms.dedup_by(|p, q| (p.location - q.location).abs() < 1e-12);
    let mut lo = a - band;
    let mut hi = a + band;
    for atom in &atoms {
        lo = lo.min(atom.location);
        hi = hi.max(atom.location);
    }
    (Interval { lo, hi }, atoms)
}

/// Closed-form Jacobi–Szegő parameters of a catalog measure.
pub fn recurrence_of(measure: &MeasureSpec) -> JacobiSzegoSequence {
    sequence_for(&measure.params)
}

pub fn sequence_for(p: &FamilyParams) -> JacobiSzegoSequence {
    match p.family {
        Family::Sym1 => JacobiSzegoSequence::scaled_gegenbauer(p.lambda),
        Family::Sym2 => JacobiSzegoSequence::scaled_gegenbauer(p.lambda - 1.0),
        Family::NonSymPlus => JacobiSzegoSequence::shifted_jacobi(p.lambda, 1.0),
        Family::NonSymMinus => JacobiSzegoSequence::shifted_jacobi(p.lambda, -1.0),
        Family::FreeMeixner => JacobiSzegoSequence::free_meixner(p.a, p.b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    /// Eigenvalues of the Jacobi matrix; exact to degree `2 * order - 1`.
    Gauss,
    /// Composite rule built from the density.
    Discretized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// `node,weight` CSV with 17 significant digits, preceded by one `#`
    /// comment line.
    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = format!("# {comment}\nnode,weight\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push_str(&format!("{},{}\n", sig17(*x), sig17(*w)));
        }
        out
    }
}

/// Formats with 17 significant digits in scientific notation.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Gauss rule of `order` nodes from the eigen-decomposition of the Jacobi
/// matrix.
pub fn gauss_quadrature(measure: &MeasureSpec, order: usize) -> Result<QuadratureRule> {
    gauss_rule_from_sequence(&recurrence_of(measure), order)
}

pub fn gauss_rule_from_sequence(seq: &JacobiSzegoSequence, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Precondition("quadrature order must be >= 1".into()));
    }
    if let Some(len) = seq.len() {
        if len < order {
            return Err(Error::Precondition(format!(
                "order {order} needs recurrence coefficients up to index {}, table has {len}",
                order - 1
            )));
        }
    }
    let diag: Vec<f64> = (0..order).map(|i| seq.alpha(i)).collect();
    let mut off = Vec::with_capacity(order.saturating_sub(1));
    for i in 1..order {
        let w = seq.omega(i);
        if !(w >= 0.0) {
            return Err(Error::NumericalBreakdown { index: i, detail: format!("omega_{i} = {w} is negative") });
        }
        off.push(w.sqrt());
    }
    let diagnostics = || {
        let diag_max = diag.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let off_min = off.iter().copied().fold(f64::INFINITY, f64::min);
        let off_max = off.iter().copied().fold(0.0, f64::max);
        format!("order {order}, |diag| max {diag_max:e}, off-diagonal range [{off_min:e}, {off_max:e}]")
    };
    let (nodes, weights) = tridiagonal_eigen(&diag, &off).ok_or_else(|| Error::EigenSolver(diagnostics()))?;
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
    if pairs.iter().any(|(x, w)| !x.is_finite() || !w.is_finite()) {
        return Err(Error::EigenSolver(diagnostics()));
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::EigenSolver(format!("weights sum to {total}; {}", diagnostics())));
    }
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        order,
        kind: RuleKind::Gauss,
    })
}

/// Raw moment `∫ x^k dμ` through a Gauss rule of the given order.
pub fn moment(measure: &MeasureSpec, k: u32, order: usize) -> Result<f64> {
    if 2 * order < k as usize + 1 {
        return Err(Error::Precondition(format!(
            "order {order} is exact only up to degree {}, moment {k} requested",
            (2 * order).saturating_sub(1)
        )));
    }
    let rule = gauss_quadrature(measure, order)?;
    Ok(rule.integrate(|x| x.powi(k as i32)))
}

/// A fine discretization built from the density alone, independent of the
/// closed-form recurrence. Weights are normalized to sum to one.
pub fn discretized_rule(measure: &MeasureSpec) -> Result<QuadratureRule> {
    let w = measure.weight.ok_or_else(|| {
        Error::InvalidInput(format!("{} has no density to discretize", measure.family()))
    })?;
    let (nodes, mut weights) = w.discretize(24, 24);
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|v| *v /= total);
    Ok(QuadratureRule { order: nodes.len(), nodes, weights, kind: RuleKind::Discretized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::stieltjes_from_quadrature;

    #[test]
    fn uniform_special_cases() {
        let m = build_measure(Family::Sym1, 0.5, None, None).unwrap();
        let r = 3f64.sqrt();
        assert!((m.support.lo + r).abs() < 1e-15 && (m.support.hi - r).abs() < 1e-15);
        assert!((m.density(0.3).unwrap() - 1.0 / (2.0 * r)).abs() < 1e-12);
        let var = m.integrate_density(|x| x * x, 1e-13).unwrap();
        assert!((var - 1.0).abs() < 1e-12);

        let m2 = build_measure(Family::Sym2, 1.5, None, None).unwrap();
        assert!((m2.support.hi - r).abs() < 1e-15);
        assert!((m2.density(-1.0).unwrap() - m2.density(1.2).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn nonsym_support() {
        let m = build_measure(Family::NonSymPlus, 2.0, None, None).unwrap();
        let s = 3f64.sqrt();
        assert!((m.support.lo + 3.0 / s).abs() < 1e-15);
        assert!((m.support.hi - 5.0 / s).abs() < 1e-15);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(build_measure(Family::Sym1, -1.0, None, None), Err(Error::Parameter(_))));
        assert!(matches!(build_measure(Family::Sym2, 0.5, None, None), Err(Error::Parameter(_))));
        assert!(matches!(build_measure(Family::Sym2, 0.505, None, None), Err(Error::Parameter(_))));
        assert!(matches!(build_measure(Family::NonSymPlus, 1.0, None, None), Err(Error::Redirect(_))));
        assert!(matches!(build_measure(Family::Sym1, 1.0, None, None), Err(Error::Redirect(_))));
        assert!(matches!(
            build_measure(Family::FreeMeixner, 1.0, Some(0.0), Some(-1.5)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(build_measure(Family::FreeMeixner, 2.0, None, None), Err(Error::Parameter(_))));
    }

    #[test]
    fn recurrence_examples() {
        let m = build_measure(Family::Sym1, 2.0, None, None).unwrap();
        assert!((recurrence_of(&m).omega(2) - 1.25).abs() < 1e-15);
        let m = build_measure(Family::Sym2, 2.0, None, None).unwrap();
        assert!((recurrence_of(&m).omega(2) - 1.0).abs() < 1e-15);
        let m = build_measure(Family::FreeMeixner, 1.0, Some(0.3), Some(0.2)).unwrap();
        let seq = recurrence_of(&m);
        assert_eq!(seq.alpha(3), 0.3);
        assert!((seq.omega(3) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn gauss_rule_examples() {
        let m = build_measure(Family::Sym1, 0.5, None, None).unwrap();
        let rule = gauss_quadrature(&m, 2).unwrap();
        assert!((rule.nodes[0] + 1.0).abs() < 1e-14 && (rule.nodes[1] - 1.0).abs() < 1e-14);
        assert!((rule.weights[0] - 0.5).abs() < 1e-14 && (rule.weights[1] - 0.5).abs() < 1e-14);

        let one = gauss_quadrature(&m, 1).unwrap();
        assert_eq!(one.nodes, vec![0.0]);
        assert_eq!(one.weights, vec![1.0]);

        let ns = build_measure(Family::NonSymPlus, 2.0, None, None).unwrap();
        let rule = gauss_quadrature(&ns, 12).unwrap();
        assert!((rule.integrate(|x| x * x) - 1.0).abs() < 1e-10);
        assert!(matches!(gauss_quadrature(&ns, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn moment_preconditions() {
        let m = build_measure(Family::Sym2, 2.5, None, None).unwrap();
        assert!((moment(&m, 0, 4).unwrap() - 1.0).abs() < 1e-14);
        assert!(moment(&m, 1, 4).unwrap().abs() < 1e-12);
        assert!((moment(&m, 2, 4).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(moment(&m, 8, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn reflection_of_nonsymmetric_densities() {
        for &l in &[0.6, 1.3, 2.0, 2.7] {
            let p = build_measure(Family::NonSymPlus, l, None, None).unwrap();
            let m = build_measure(Family::NonSymMinus, l, None, None).unwrap();
            for i in 1..40 {
                let x = p.support.lo + (p.support.hi - p.support.lo) * i as f64 / 40.0;
                let lhs = m.density(-x).unwrap();
                let rhs = p.density(x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "lambda {l}, x {x}");
            }
        }
    }

    #[test]
    fn endpoint_behaviour() {
        // exponent lambda - 1/2 > 0 at the upper end, lambda - 3/2 < 0 at the lower end
        let p = build_measure(Family::NonSymPlus, 1.2, None, None).unwrap();
        assert!(p.density(p.support.hi - 1e-9).unwrap() < 1e-3);
        assert!(p.density(p.support.lo + 1e-9).unwrap() > 10.0);
    }

    #[test]
    fn free_meixner_atom_is_seen_by_gauss_rule() {
        let m = build_measure(Family::FreeMeixner, 1.0, Some(-1.0), Some(-0.5)).unwrap();
        assert_eq!(m.atoms.len(), 1);
        let atom = m.atoms[0];
        assert!((atom.location - (3f64.sqrt() - 1.0)).abs() < 1e-14);
        let rule = gauss_quadrature(&m, 60).unwrap();
        let last = rule.nodes.len() - 1;
        assert!((rule.nodes[last] - atom.location).abs() < 1e-10);
        assert!((rule.weights[last] - atom.mass).abs() < 1e-10);
        assert!((m.support.hi - atom.location).abs() < 1e-15);
    }

    #[test]
    fn two_point_free_meixner() {
        let m = build_measure(Family::FreeMeixner, 1.0, Some(0.5), Some(-1.0)).unwrap();
        assert_eq!(m.atoms.len(), 2);
        let mass: f64 = m.atoms.iter().map(|a| a.mass).sum();
        let mean: f64 = m.atoms.iter().map(|a| a.mass * a.location).sum();
        let var: f64 = m.atoms.iter().map(|a| a.mass * a.location.powi(2)).sum();
        assert!((mass - 1.0).abs() < 1e-14 && mean.abs() < 1e-14 && (var - 1.0).abs() < 1e-14);
    }

    #[test]
    fn csv_export() {
        let m = build_measure(Family::Sym1, 0.5, None, None).unwrap();
        let csv = gauss_quadrature(&m, 1).unwrap().to_csv("family=sym1");
        assert_eq!(csv, "# family=sym1\nnode,weight\n0.0000000000000000e0,1.0000000000000000e0\n");
    }

    #[test]
    fn discretized_rule_recovers_recurrence() {
        let m = build_measure(Family::Sym1, 2.0, None, None).unwrap();
        let seq = stieltjes_from_quadrature(&discretized_rule(&m).unwrap(), 8).unwrap();
        assert!((seq.omega(2) - 1.25).abs() < 1e-10);
        let m = build_measure(Family::NonSymPlus, 2.0, None, None).unwrap();
        let seq = stieltjes_from_quadrature(&discretized_rule(&m).unwrap(), 8).unwrap();
        assert!((seq.alpha(1) - 2.0 / 27f64.sqrt()).abs() < 1e-10);
    }
}
