//! The generating function `psi(z, x) = 1 / (u(z) (f(z) - x)^lambda)`, both
//! as a closed form and as the series `sum (lambda)_n / n! P_n(x) z^n`.
//!
//! Every family factors as `u(z) = z^lambda v(z)` with `v` rational and
//! `v(0) = 1`, and `z f(z)` is a quadratic polynomial. The closed form uses
//! principal powers of `z` and `f(z) - x` separately; [`psi_continuous`]
//! combines them into `(z f(z) - x z)^lambda`, which stays analytic on a full
//! disc and is what real-`z` moment checks evaluate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{self, Family, FamilyParams, Interval, MeasureSpec};
use crate::poly::{quadratic_complex_roots, Poly};
use crate::recurrence::JacobiSzegoSequence;

/// Fraction of the distance to the nearest singularity kept as domain radius.
pub const DOMAIN_SAFETY: f64 = 0.9;
/// Relative size of the last series term above which a warning is attached.
pub const SERIES_WARN_RATIO: f64 = 1e-8;
/// Hard cap for the adaptive series.
pub const SERIES_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GenFunClosedForm {
    pub params: FamilyParams,
    pub domain_radius: f64,
    pub excludes_negative_axis: bool,
    /// `z f(z)` as a polynomial in `z`.
    zf: Poly,
    /// `1 / v(z)` as a polynomial in `z`.
    v_inv: Poly,
    alpha1: f64,
    omega2: f64,
}

pub fn closed_form(family: Family, lambda: f64, a: Option<f64>, b: Option<f64>) -> Result<GenFunClosedForm> {
    closed_form_from_params(FamilyParams::new(family, lambda, a, b)?)
}

pub fn closed_form_from_params(params: FamilyParams) -> Result<GenFunClosedForm> {
    let l = params.lambda;
    let (zf, v_inv) = match params.family {
        Family::Sym1 => (Poly::new(vec![1.0, 0.0, 0.5 * (1.0 + l)]), Poly::constant(1.0)),
        Family::Sym2 => (Poly::new(vec![1.0, 0.0, 0.5 * l]), Poly::new(vec![1.0, 0.0, -0.5 * l])),
        Family::NonSymPlus | Family::NonSymMinus => {
            let sign = params.family.sign();
            let s = (2.0 * l - 1.0).sqrt();
            (
                Poly::new(vec![1.0, sign / s, l * l / (2.0 * l - 1.0)]),
                Poly::new(vec![1.0, sign * l / s]),
            )
        }
        Family::FreeMeixner => (
            Poly::new(vec![1.0, params.a, 1.0 + params.b]),
            Poly::new(vec![1.0, params.a, params.b]),
        ),
    };
    let seq = measures::sequence_for(&params);
    let support = measures::support_of(&params);
    let radius = DOMAIN_SAFETY * nearest_singularity(&zf, &v_inv, &support);
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Parameter(format!("degenerate domain radius {radius} for {params:?}")));
    }
    Ok(GenFunClosedForm {
        params,
        domain_radius: radius,
        excludes_negative_axis: l.fract() != 0.0,
        zf,
        v_inv,
        alpha1: seq.alpha(1),
        omega2: seq.omega(2),
    })
}

/// Smallest modulus among zeros of `v^{-1}` and zeros of `z (f(z) - x)` for
/// `x` across the support.
fn nearest_singularity(zf: &Poly, v_inv: &Poly, support: &Interval) -> f64 {
    let mut nearest = f64::INFINITY;
    let mut consider = |p: &Poly| {
        for r in quadratic_complex_roots(p.coeff(0), p.coeff(1), p.coeff(2)) {
            nearest = nearest.min(r.norm());
        }
    };
    consider(v_inv);
    consider(zf);
    for x in support.grid(65) {
        consider(&(zf - &Poly::monomial(x, 1)));
    }
    nearest
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl GenFunClosedForm {
    pub fn family(&self) -> Family {
        self.params.family
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    /// `alpha_1` of the associated recurrence.
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    /// `omega_2` of the associated recurrence.
    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn sequence(&self) -> JacobiSzegoSequence {
        measures::sequence_for(&self.params)
    }

    pub fn zf_poly(&self) -> &Poly {
        &self.zf
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        self.zf.eval_complex(z) / z
    }

    pub fn f_prime(&self, z: Complex64) -> Complex64 {
        // (zf)' = f + z f'
        (self.zf.derivative().eval_complex(z) - self.f(z)) / z
    }

    /// `v(z) = u(z) / z^lambda`.
    pub fn u_reduced(&self, z: Complex64) -> Complex64 {
        c(1.0) / self.v_inv.eval_complex(z)
    }

    /// `u(z) = z^lambda v(z)` with the principal power.
    pub fn u(&self, z: Complex64) -> Complex64 {
        principal_pow(z, self.lambda()) * self.u_reduced(z)
    }

    /// `u'(z) / u(z) = lambda / z - (v^{-1})' / v^{-1}`.
    pub fn u_log_derivative(&self, z: Complex64) -> Complex64 {
        c(self.lambda()) / z - self.v_inv.derivative().eval_complex(z) / self.v_inv.eval_complex(z)
    }

    pub fn u_prime(&self, z: Complex64) -> Complex64 {
        self.u(z) * self.u_log_derivative(z)
    }

    /// `g(z) = f(z) - Q_1(z) / 2` with `Q_1(z) = (lambda + 1) omega_2 z + alpha_1`.
    pub fn g(&self, z: Complex64) -> Complex64 {
        let q1 = c((self.lambda() + 1.0) * self.omega2) * z + self.alpha1;
        self.f(z) - q1 * 0.5
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.domain_radius && !(self.excludes_negative_axis && on_negative_axis(z))
    }

    pub fn check_domain(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidInput(format!("z must be finite, got {z}")));
        }
        if z.norm() >= self.domain_radius {
            return Err(Error::Domain(format!(
                "|z| = {} is not below the domain radius {}",
                z.norm(),
                self.domain_radius
            )));
        }
        if self.excludes_negative_axis && on_negative_axis(z) {
            return Err(Error::Domain(format!("z = {z} lies on the cut along the negative axis")));
        }
        Ok(())
    }
}

fn on_negative_axis(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0
}

/// `w^p = exp(p Log w)` with the principal logarithm.
pub fn principal_pow(w: Complex64, p: f64) -> Complex64 {
    if w == c(0.0) {
        return c(0.0);
    }
    (w.ln() * p).exp()
}

/// Closed form `1 / (u(z) exp(lambda Log(f(z) - x)))`.
///
/// Returns a branch error when `f(z) - x` sits on the cut, or when the two
/// principal arguments of `z` and `f(z) - x` no longer add up to the argument
/// of their product (the point is then outside the cut region where the
/// product of principal powers is the analytic continuation).
pub fn psi_closed(cf: &GenFunClosedForm, z: Complex64, x: f64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    if z == c(0.0) {
        return Ok(c(1.0));
    }
    cf.check_domain(z)?;
    let w = cf.f(z) - x;
    if w == c(0.0) {
        return Err(Error::Singularity(format!("f(z) = x at z = {z}, x = {x}")));
    }
    if cf.excludes_negative_axis {
        if on_negative_axis(w) || w.re <= 0.0 && w.im == 0.0 {
            return Err(Error::Branch { z, x });
        }
        let gap = z.arg() + w.arg() - (z * w).arg();
        if gap.abs() > std::f64::consts::PI {
            return Err(Error::Branch { z, x });
        }
    }
    Ok(c(1.0) / (cf.u(z) * principal_pow(w, cf.lambda())))
}

/// `1 / (v(z) (z f(z) - x z)^lambda)`: the same function as [`psi_closed`]
/// on the cut region, continued analytically across the negative axis.
pub fn psi_continuous(cf: &GenFunClosedForm, z: Complex64, x: f64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    if z.norm() >= cf.domain_radius {
        return Err(Error::Domain(format!(
            "|z| = {} is not below the domain radius {}",
            z.norm(),
            cf.domain_radius
        )));
    }
    let w = cf.zf.eval_complex(z) - z * x;
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(Error::Branch { z, x });
    }
    Ok(c(1.0) / (cf.u_reduced(z) * principal_pow(w, cf.lambda())))
}

/// A partial sum of the generating series with its convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Modulus of the last retained term.
    pub last_term: f64,
    pub n_terms: usize,
    pub warning: Option<String>,
}

fn check_series_inputs(seq: &JacobiSzegoSequence, lambda: f64, z: Complex64, x: f64, n_terms: usize) -> Result<()> {
    if n_terms == 0 {
        return Err(Error::Precondition("series needs at least one term".into()));
    }
    if !x.is_finite() || !z.re.is_finite() || !z.im.is_finite() || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite input: lambda {lambda}, z {z}, x {x}")));
    }
    if let Some(len) = seq.len() {
        if n_terms > len {
            return Err(Error::Precondition(format!(
                "{n_terms} terms need recurrence coefficients up to index {}, table has {len}",
                n_terms - 1
            )));
        }
    }
    Ok(())
}

/// Iterates the terms `(lambda)_n / n! P_n(x) z^n`.
struct Terms<'a> {
    seq: &'a JacobiSzegoSequence,
    lambda: f64,
    z: Complex64,
    x: f64,
    n: usize,
    coeff: f64,
    zn: Complex64,
    p_prev: f64,
    p_cur: f64,
}

impl<'a> Terms<'a> {
    fn new(seq: &'a JacobiSzegoSequence, lambda: f64, z: Complex64, x: f64) -> Self {
        Terms { seq, lambda, z, x, n: 0, coeff: 1.0, zn: c(1.0), p_prev: 0.0, p_cur: 1.0 }
    }
}

impl Iterator for Terms<'_> {
    type Item = Complex64;
    fn next(&mut self) -> Option<Complex64> {
        let n = self.n;
        let term = self.zn * (self.coeff * self.p_cur);
        let next_p = (self.x - self.seq.alpha(n)) * self.p_cur - self.seq.omega(n) * self.p_prev;
        self.p_prev = self.p_cur;
        self.p_cur = next_p;
        self.coeff *= (self.lambda + n as f64) / (n as f64 + 1.0);
        self.zn *= self.z;
        self.n += 1;
        Some(term)
    }
}

/// Partial sum over `n < n_terms`.
pub fn psi_series(seq: &JacobiSzegoSequence, lambda: f64, z: Complex64, x: f64, n_terms: usize) -> Result<SeriesValue> {
    check_series_inputs(seq, lambda, z, x, n_terms)?;
    let mut sum = c(0.0);
    let mut last = 0.0;
    for term in Terms::new(seq, lambda, z, x).take(n_terms) {
        sum += term;
        last = term.norm();
    }
    let warning = (last > SERIES_WARN_RATIO * sum.norm()).then(|| {
        format!("last term {last:e} exceeds {SERIES_WARN_RATIO:e} of |sum| = {:e}", sum.norm())
    });
    Ok(SeriesValue { value: sum, last_term: last, n_terms, warning })
}

/// Sums until three consecutive terms fall below `1e-15 |sum|`, capped at
/// [`SERIES_MAX_TERMS`].
pub fn psi_series_adaptive(seq: &JacobiSzegoSequence, lambda: f64, z: Complex64, x: f64) -> Result<SeriesValue> {
    let cap = seq.len().map_or(SERIES_MAX_TERMS, |len| len.min(SERIES_MAX_TERMS));
    check_series_inputs(seq, lambda, z, x, cap)?;
    let mut sum = c(0.0);
    let mut small_run = 0;
    let mut last = 0.0;
    let mut used = 0;
    for term in Terms::new(seq, lambda, z, x).take(cap) {
        sum += term;
        last = term.norm();
        used += 1;
        if last < 1e-15 * sum.norm() {
            small_run += 1;
            if small_run == 3 {
                return Ok(SeriesValue { value: sum, last_term: last, n_terms: used, warning: None });
            }
        } else {
            small_run = 0;
        }
    }
    Ok(SeriesValue {
        value: sum,
        last_term: last,
        n_terms: used,
        warning: Some(format!("no convergence within {used} terms (last term {last:e})")),
    })
}

/// Moments of the tilted measure `psi(z, x) mu(dx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiMoments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

/// The claimed moments: `m0 = 1`, `m1 = lambda z`,
/// `m2 = lambda (lambda + 1) / 2 omega_2 z^2 + lambda alpha_1 z + 1`.
pub fn expected_moments(lambda: f64, alpha1: f64, omega2: f64, z: f64) -> PsiMoments {
    PsiMoments {
        m0: 1.0,
        m1: lambda * z,
        m2: 0.5 * lambda * (lambda + 1.0) * omega2 * z * z + lambda * alpha1 * z + 1.0,
    }
}

/// `∫ x^i psi(z, x) mu(dx)` for `i = 0, 1, 2` by a Gauss rule of `order` nodes.
pub fn psi_family_moments(measure: &MeasureSpec, cf: &GenFunClosedForm, z: f64, order: usize) -> Result<PsiMoments> {
    if order < 12 {
        return Err(Error::Precondition(format!("quadrature order must be >= 12, got {order}")));
    }
    if measure.params != cf.params {
        return Err(Error::InvalidInput("measure and closed form describe different laws".into()));
    }
    let rule = measures::gauss_quadrature(measure, order)?;
    let mut m = [0.0; 3];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let psi = psi_continuous(cf, c(z), *x)?;
        if psi.im.abs() > 1e-12 * psi.norm() {
            return Err(Error::Branch { z: c(z), x: *x });
        }
        m[0] += w * psi.re;
        m[1] += w * x * psi.re;
        m[2] += w * x * x * psi.re;
    }
    Ok(PsiMoments { m0: m[0], m1: m[1], m2: m[2] })
}
