//! The Riccati equation `Q2 f' = f^2 - Q1 f + R1` satisfied by `f`, and the
//! classification of its solutions of the form `g = f - Q1/2 = E(z)/z` with
//! `E` a polynomial.
//!
//! The solvers never use the closed-form answers: every coefficient equation
//! is read off the residual polynomial `Q2 (zE' - E) - E^2 - z^2 Q2~`, built
//! with polynomial arithmetic and probed at a few values of the unknowns.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::genfun::{self, GenFunClosedForm};
use crate::measures::{self, Family, FamilyParams, MeasureSpec, LAMBDA_ONE_BAND};
use crate::poly::{quadratic_real_roots, Poly};

/// Coefficients of `Q2`, `Q1`, `R1` and `Q2~`, ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiCoefficients {
    pub q2: [f64; 3],
    pub q1: [f64; 2],
    pub r1: [f64; 3],
    pub q2_tilde: [f64; 3],
    pub lambda: f64,
    pub alpha1: f64,
    pub omega2: f64,
}

pub fn coefficients(lambda: f64, alpha1: f64, omega2: f64) -> RiccatiCoefficients {
    let l = lambda;
    let q2 = [-1.0, -l * alpha1, l * (l - 0.5 * (l + 1.0) * omega2)];
    let q1 = [alpha1, (l + 1.0) * omega2];
    let r1 = [-1.0, 0.0, 0.5 * l * (l + 1.0) * omega2];
    // R1 - Q1^2 / 4 - (lambda + 1) omega_2 Q2 / 2
    let q1_poly = Poly::new(q1.to_vec());
    let tilde = &(&Poly::new(r1.to_vec()) - &(&q1_poly * &q1_poly).scale(0.25))
        - &Poly::new(q2.to_vec()).scale(0.5 * (l + 1.0) * omega2);
    RiccatiCoefficients {
        q2,
        q1,
        r1,
        q2_tilde: [tilde.coeff(0), tilde.coeff(1), tilde.coeff(2)],
        lambda,
        alpha1,
        omega2,
    }
}

impl RiccatiCoefficients {
    pub fn q2_poly(&self) -> Poly {
        Poly::new(self.q2.to_vec())
    }

    pub fn q1_poly(&self) -> Poly {
        Poly::new(self.q1.to_vec())
    }

    pub fn r1_poly(&self) -> Poly {
        Poly::new(self.r1.to_vec())
    }

    pub fn q2_tilde_poly(&self) -> Poly {
        Poly::new(self.q2_tilde.to_vec())
    }
}

/// `Q2 (zE' - E) - E^2 - z^2 Q2~`; it vanishes identically exactly when
/// `g = E/z` solves the reduced Riccati equation.
pub fn ansatz_residual(coeffs: &RiccatiCoefficients, e: &Poly) -> Poly {
    let ze = &e.derivative().shift(1) - e;
    &(&(&coeffs.q2_poly() * &ze) - &(e * e)) - &coeffs.q2_tilde_poly().shift(2)
}

/// Anything with an `f` and an analytic `f'`.
pub trait RiccatiCandidate {
    fn f(&self, z: Complex64) -> Complex64;
    fn f_prime(&self, z: Complex64) -> Complex64;
    fn check_point(&self, z: Complex64) -> Result<()>;
}

impl RiccatiCandidate for GenFunClosedForm {
    fn f(&self, z: Complex64) -> Complex64 {
        GenFunClosedForm::f(self, z)
    }

    fn f_prime(&self, z: Complex64) -> Complex64 {
        GenFunClosedForm::f_prime(self, z)
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        self.check_domain(z)
    }
}

fn check_nonzero(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("the equation is singular at z = 0".into()));
    }
    Ok(())
}

/// `Q2 f' - f^2 + Q1 f - R1` at `z`.
pub fn residual_f<C: RiccatiCandidate + ?Sized>(cand: &C, coeffs: &RiccatiCoefficients, z: Complex64) -> Result<Complex64> {
    check_nonzero(z)?;
    cand.check_point(z)?;
    let f = cand.f(z);
    let q2 = coeffs.q2_poly().eval_complex(z);
    let q1 = coeffs.q1_poly().eval_complex(z);
    let r1 = coeffs.r1_poly().eval_complex(z);
    Ok(q2 * cand.f_prime(z) - f * f + q1 * f - r1)
}

/// `u'/u - lambda (1 - f') / (f - lambda z)` at `z`.
pub fn residual_u(cf: &GenFunClosedForm, z: Complex64) -> Result<Complex64> {
    check_nonzero(z)?;
    cf.check_domain(z)?;
    let l = cf.lambda();
    let denom = cf.f(z) - z * l;
    if denom.norm() <= 1e-14 * cf.f(z).norm() {
        return Err(Error::Singularity(format!("f(z) = lambda z at z = {z}")));
    }
    Ok(cf.u_log_derivative(z) - (1.0 - cf.f_prime(z)) * l / denom)
}

/// Default finite-difference step for [`residual_moment_ode`].
pub fn default_step(cf: &GenFunClosedForm) -> f64 {
    1e-5 * cf.domain_radius
}

/// Residuals of the two first-order equations for the moments, with the
/// derivatives on the left taken by a five-point central stencil:
///
/// * `(u (f - lambda z))' - (1 - lambda) u f'`
/// * `([lambda z f - m2] u)' - lambda (1 - lambda) z u f'`
///
/// where `m2` is the claimed second moment of the tilted law.
pub fn residual_moment_ode(cf: &GenFunClosedForm, measure: &MeasureSpec, z: f64, step: f64) -> Result<(f64, f64)> {
    if measure.params != cf.params {
        return Err(Error::InvalidInput("measure and closed form describe different laws".into()));
    }
    if !(step > 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!("need finite z and positive step, got z = {z}, step = {step}")));
    }
    if z.abs() + 2.0 * step >= cf.domain_radius || z.abs() <= 2.0 * step {
        return Err(Error::Domain(format!(
            "stencil z = {z} +- {} leaves (0, {}) in modulus",
            2.0 * step,
            cf.domain_radius
        )));
    }
    let l = cf.lambda();
    let c = |t: f64| Complex64::new(t, 0.0);
    let m2 = |t: f64| genfun::expected_moments(l, cf.alpha1(), cf.omega2(), t).m2;
    let first = |t: f64| cf.u(c(t)) * (cf.f(c(t)) - t * l);
    let second = |t: f64| cf.u(c(t)) * (cf.f(c(t)) * (l * t) - m2(t));
    let diff = |g: &dyn Fn(f64) -> Complex64| {
        (g(z - 2.0 * step) - g(z + 2.0 * step) + (g(z + step) - g(z - step)) * 8.0) / (12.0 * step)
    };
    let uf = cf.u(c(z)) * cf.f_prime(c(z));
    let r_first = diff(&first) - uf * (1.0 - l);
    let r_second = diff(&second) - uf * (l * (1.0 - l) * z);
    Ok((r_first.norm(), r_second.norm()))
}

/// A polynomial solution `E = a0 z^2 + a1 z + a2` of the reduced equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationSolution {
    pub lambda: f64,
    pub symmetric: bool,
    pub omega2: f64,
    pub alpha1: f64,
    /// `[a0, a1, a2]`.
    pub e_coeffs: [f64; 3],
    pub branch_label: String,
    /// Worst of the coefficient-equation residuals and of `residual_f` on
    /// the circles `|z| = 0.05, 0.1`.
    pub max_residual: f64,
    /// Moduli of the `z^0 .. z^4` coefficients of the ansatz residual.
    pub equation_residuals: [f64; 5],
    pub valid: bool,
    /// The catalogued family this branch is, when valid.
    pub family: Option<Family>,
}

impl ClassificationSolution {
    pub fn coefficients(&self) -> RiccatiCoefficients {
        coefficients(self.lambda, self.alpha1, self.omega2)
    }

    fn e_poly(&self) -> Poly {
        let [a0, a1, a2] = self.e_coeffs;
        Poly::new(vec![a2, a1, a0])
    }

    /// `g(z) = E(z) / z`.
    pub fn g(&self, z: Complex64) -> Complex64 {
        self.e_poly().eval_complex(z) / z
    }
}

impl RiccatiCandidate for ClassificationSolution {
    fn f(&self, z: Complex64) -> Complex64 {
        self.g(z) + self.coefficients().q1_poly().eval_complex(z) * 0.5
    }

    fn f_prime(&self, z: Complex64) -> Complex64 {
        let e = self.e_poly();
        let ze = &e.derivative().shift(1) - &e;
        ze.eval_complex(z) / (z * z) + 0.5 * self.coefficients().q1[1]
    }

    fn check_point(&self, _z: Complex64) -> Result<()> {
        Ok(())
    }
}

/// Sixteen points on each circle `|z| = 0.05, 0.1`, none on the real axis.
pub fn residual_grid() -> Vec<Complex64> {
    let mut points = Vec::with_capacity(32);
    for r in [0.05, 0.1] {
        for k in 0..16 {
            let theta = (2 * k + 1) as f64 * std::f64::consts::PI / 16.0 - std::f64::consts::PI;
            points.push(Complex64::from_polar(r, theta));
        }
    }
    points
}

fn finish(mut sol: ClassificationSolution) -> ClassificationSolution {
    let coeffs = sol.coefficients();
    let residual = ansatz_residual(&coeffs, &sol.e_poly());
    for (k, r) in sol.equation_residuals.iter_mut().enumerate() {
        *r = residual.coeff(k).abs();
    }
    let mut worst = residual.max_abs();
    for z in residual_grid() {
        if let Ok(r) = residual_f(&sol, &coeffs, z) {
            worst = worst.max(r.norm());
        }
    }
    sol.max_residual = worst;
    sol
}

/// Root of the affine function `h`, from its values at 0 and 1.
fn linear_root(h: impl Fn(f64) -> f64) -> f64 {
    let h0 = h(0.0);
    let h1 = h(1.0);
    -h0 / (h1 - h0)
}

/// Coefficients `[c0, c1, c2]` of the quadratic `h`, from three values.
fn quadratic_fit(h: impl Fn(f64) -> f64) -> [f64; 3] {
    let (hm, h0, hp) = (h(-1.0), h(0.0), h(1.0));
    [h0, 0.5 * (hp - hm), 0.5 * (hp + hm) - h0]
}

fn check_solver_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    if (lambda - 1.0).abs() < LAMBDA_ONE_BAND {
        return Err(Error::Redirect(
            "lambda = 1 is the degenerate case: free Meixner family (see free_meixner_uniqueness)".into(),
        ));
    }
    if (lambda - 0.5).abs() < 1e-6 {
        return Err(Error::Parameter(format!("lambda = {lambda} is too close to 1/2 to solve reliably")));
    }
    Ok(())
}

/// Coefficient `k` of the ansatz residual for `E = a0 z^2 + a1 z + a2`.
fn equation(lambda: f64, alpha1: f64, omega2: f64, e: [f64; 3], k: usize) -> f64 {
    let [a0, a1, a2] = e;
    ansatz_residual(&coefficients(lambda, alpha1, omega2), &Poly::new(vec![a2, a1, a0])).coeff(k)
}

/// `a2` from the `z^0` equation `a2 - a2^2 = 0`, keeping the non-zero root
/// (the normalization `z g(z) -> 1`).
fn solve_a2(lambda: f64) -> Result<f64> {
    let c = quadratic_fit(|a2| equation(lambda, 0.0, 1.0, [0.0, 0.0, a2], 0));
    let roots = quadratic_real_roots(c[0], c[1], c[2])
        .ok_or_else(|| Error::Inconsistency("z^0 equation has no real root".into()))?;
    roots
        .into_iter()
        .find(|r| r.abs() > 0.5)
        .ok_or_else(|| Error::Inconsistency("z^0 equation only admits E(0) = 0".into()))
}

/// The quadratic in `omega_2` of the symmetric system, with the leading
/// coefficient normalized to `-(lambda + 1)(lambda + 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricQuadratic {
    /// `[c0, c1, c2]`, ascending.
    pub coeffs: [f64; 3],
    pub discriminant: f64,
}

fn symmetric_a0(lambda: f64, a2: f64, omega2: f64) -> f64 {
    linear_root(|a0| equation(lambda, 0.0, omega2, [a0, 0.0, a2], 2))
}

/// Builds the quadratic satisfied by `omega_2` when `alpha_1 = 0`.
pub fn symmetric_quadratic(lambda: f64) -> Result<SymmetricQuadratic> {
    check_solver_lambda(lambda)?;
    let a2 = solve_a2(lambda)?;
    let raw = quadratic_fit(|w| equation(lambda, 0.0, w, [symmetric_a0(lambda, a2, w), 0.0, a2], 4));
    let scale = -(lambda + 1.0) * (lambda + 2.0) / raw[2];
    let coeffs = [raw[0] * scale, raw[1] * scale, raw[2] * scale];
    Ok(SymmetricQuadratic { coeffs, discriminant: coeffs[1] * coeffs[1] - 4.0 * coeffs[0] * coeffs[2] })
}

/// Both symmetric branches, larger `omega_2` first.
pub fn solve_symmetric(lambda: f64) -> Result<Vec<ClassificationSolution>> {
    check_solver_lambda(lambda)?;
    let a2 = solve_a2(lambda)?;
    let a1 = linear_root(|a1| equation(lambda, 0.0, 1.0, [0.0, a1, a2], 1));
    let quad = symmetric_quadratic(lambda)?;
    let [c0, c1, c2] = quad.coeffs;
    let mut roots = quadratic_real_roots(c0, c1, c2)
        .ok_or_else(|| Error::Inconsistency(format!("negative discriminant {}", quad.discriminant)))?;
    roots.sort_by(|a, b| b.total_cmp(a));
    let labels = ["symmetric branch 1 (ultraspherical)", "symmetric branch 2"];
    let families = [Family::Sym1, Family::Sym2];
    Ok(roots
        .into_iter()
        .zip(labels.iter().zip(families))
        .map(|(omega2, (label, family))| {
            let a0 = symmetric_a0(lambda, a2, omega2);
            let admissible = omega2 > 0.0 && (family == Family::Sym1 || lambda > 0.5);
            finish(ClassificationSolution {
                lambda,
                symmetric: true,
                omega2,
                alpha1: 0.0,
                e_coeffs: [a0, a1, a2],
                branch_label: label.to_string(),
                max_residual: 0.0,
                equation_residuals: [0.0; 5],
                valid: admissible,
                family: admissible.then_some(family),
            })
        })
        .collect())
}

/// Output of the non-symmetric solve: the two signs of `alpha_1`, and the
/// root `omega_2 = 0` of the `z^4` equation, which does not give a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct NonSymmetricSolve {
    pub solutions: Vec<ClassificationSolution>,
    pub rejected_omega2: f64,
    /// Remainder left when the rejected root is deflated from the `z^4`
    /// quadratic, relative to its largest coefficient.
    pub deflation_remainder: f64,
}

pub fn solve_nonsymmetric(lambda: f64) -> Result<NonSymmetricSolve> {
    if !(lambda > 0.5) {
        return Err(Error::Parameter(format!("non-symmetric solutions need lambda > 1/2, got {lambda}")));
    }
    check_solver_lambda(lambda)?;
    let a2 = solve_a2(lambda)?;
    // a1 is proportional to alpha_1; its ratio is read at alpha_1 = 1
    let kappa = linear_root(|a1| equation(lambda, 1.0, 1.0, [0.0, a1, a2], 1));
    // the z^3 equation is proportional to alpha_1, so a0 does not depend on it
    let a0_of = |w: f64| linear_root(|a0| equation(lambda, 1.0, w, [a0, kappa, a2], 3));
    let raw = quadratic_fit(|w| equation(lambda, 1.0, w, [a0_of(w), kappa, a2], 4));
    let quartic = Poly::new(raw.to_vec());
    let rejected = 0.0;
    let (quotient, remainder) = quartic.deflate(rejected);
    let deflation_remainder = remainder.abs() / quartic.max_abs();
    if deflation_remainder > 1e-10 {
        return Err(Error::Inconsistency(format!("omega_2 = 0 is not a root of the z^4 equation ({remainder:e})")));
    }
    let omega2 = -quotient.coeff(0) / quotient.coeff(1);
    let a0 = a0_of(omega2);
    let c = quadratic_fit(|s| equation(lambda, s, omega2, [a0, kappa * s, a2], 2));
    let alpha1_sq = -c[0] / c[2];
    if !(alpha1_sq > 0.0) || !(omega2 > 0.0) {
        return Err(Error::Inconsistency(format!(
            "no real non-symmetric solution: omega_2 = {omega2}, alpha_1^2 = {alpha1_sq}"
        )));
    }
    let solutions = [(1.0, Family::NonSymPlus, "non-symmetric, alpha_1 > 0"), (-1.0, Family::NonSymMinus, "non-symmetric, alpha_1 < 0")]
        .into_iter()
        .map(|(sign, family, label)| {
            let alpha1 = sign * alpha1_sq.sqrt();
            finish(ClassificationSolution {
                lambda,
                symmetric: false,
                omega2,
                alpha1,
                e_coeffs: [a0, kappa * alpha1, a2],
                branch_label: label.to_string(),
                max_residual: 0.0,
                equation_residuals: [0.0; 5],
                valid: true,
                family: Some(family),
            })
        })
        .collect();
    Ok(NonSymmetricSolve { solutions, rejected_omega2: rejected, deflation_remainder })
}

/// Deflates `2 lambda^3 + 3 lambda^2 - 1` by `lambda = -1` twice; returns the
/// final quotient and the two remainders.
pub fn cons_denominator_factorization() -> (Poly, f64, f64) {
    let cubic = Poly::new(vec![-1.0, 0.0, 3.0, 2.0]);
    let (q1, r1) = cubic.deflate(-1.0);
    let (q2, r2) = q1.deflate(-1.0);
    (q2, r1, r2)
}

/// For an ansatz `E` of the given degree with leading coefficient `t`, the
/// `z^(2 degree)` equation forces `t`; this repeats down to degree 3 and
/// returns the largest forced `|t|`.
pub fn degree_bound_check(lambda: f64, alpha1: f64, omega2: f64, degree: usize) -> Result<f64> {
    if !(3..=6).contains(&degree) {
        return Err(Error::Precondition(format!("degree must be in 3..=6, got {degree}")));
    }
    let coeffs = coefficients(lambda, alpha1, omega2);
    let mut worst: f64 = 0.0;
    for d in (3..=degree).rev() {
        // arbitrary lower coefficients; they cannot reach z^(2d)
        let lower: Vec<f64> = (0..d).map(|k| 1.0 + 0.37 * k as f64).collect();
        let top = |t: f64| {
            let mut e = lower.clone();
            e.push(t);
            ansatz_residual(&coeffs, &Poly::new(e)).coeff(2 * d)
        };
        let [c0, c1, c2] = quadratic_fit(top);
        let forced = match quadratic_real_roots(c0, c1, c2) {
            Some(roots) => roots.iter().fold(0.0f64, |m, r| m.max(r.abs())),
            None => (c1 / (2.0 * c2)).abs(),
        };
        worst = worst.max(forced);
    }
    Ok(worst)
}

/// Taylor coefficients of `h = g - 1/z` at `lambda = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub h0: f64,
    /// `c_1, ..., c_N`.
    pub c: Vec<f64>,
    pub n_terms: usize,
}

impl SeriesSolution {
    pub fn max_abs_coefficient(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solves `-(b z^2 + a z + 1) h' = h^2 - a^2/4 + (2/z)(h - a/2)` (multiplied
/// through by `z`) for the Taylor coefficients of `h`, one order at a time.
pub fn free_meixner_uniqueness(a: f64, b: f64, n_terms: usize) -> Result<SeriesSolution> {
    if n_terms > 30 {
        return Err(Error::Precondition(format!("at most 30 terms, got {n_terms}")));
    }
    if !(b >= -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parameter(format!("need finite a and b >= -1, got a = {a}, b = {b}")));
    }
    let q = Poly::new(vec![1.0, a, b]);
    let residual = |h: &[f64], k: usize| {
        let h = Poly::new(h.to_vec());
        let lhs = -&(&q * &h.derivative()).shift(1);
        let sq = &(&h * &h) - &Poly::constant(0.25 * a * a);
        let rhs = &sq.shift(1) + &(&h - &Poly::constant(0.5 * a)).scale(2.0);
        (&lhs - &rhs).coeff(k)
    };
    let mut h = vec![linear_root(|h0| residual(&[h0], 0))];
    for n in 1..=n_terms {
        let cn = linear_root(|c| {
            let mut trial = h.clone();
            trial.push(c);
            residual(&trial, n)
        });
        h.push(cn);
    }
    Ok(SeriesSolution { h0: h[0], c: h[1..].to_vec(), n_terms })
}

/// The family whose recurrence starts with `alpha_1`, `omega_2` at this
/// `lambda`, if any.
pub fn identify_family(lambda: f64, alpha1: f64, omega2: f64) -> Result<FamilyParams> {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-10 * (1.0 + y.abs());
    if (lambda - 1.0).abs() < LAMBDA_ONE_BAND {
        return FamilyParams::new(Family::FreeMeixner, 1.0, Some(alpha1), Some(omega2 - 1.0));
    }
    for family in [Family::Sym1, Family::Sym2, Family::NonSymPlus, Family::NonSymMinus] {
        if let Ok(params) = FamilyParams::new(family, lambda, None, None) {
            let seq = measures::sequence_for(&params);
            if close(alpha1, seq.alpha(1)) && close(omega2, seq.omega(2)) {
                return Ok(params);
            }
        }
    }
    Err(Error::Inconsistency(format!(
        "no family has lambda = {lambda}, alpha_1 = {alpha1}, omega_2 = {omega2}"
    )))
}

/// `h(0) = lambda alpha_1 / 2`, confirmed against `lim (g(z) - 1/z)` of the
/// matching closed form by linear extrapolation from `z = 1e-5, 1e-6`.
pub fn h_lambda_initial(lambda: f64, alpha1: f64, omega2: f64) -> Result<f64> {
    let claimed = 0.5 * lambda * alpha1;
    let cf = genfun::closed_form_from_params(identify_family(lambda, alpha1, omega2)?)?;
    let h = |t: f64| (cf.g(Complex64::new(t, 0.0)) - 1.0 / t).re;
    let (z1, z2) = (1e-5, 1e-6);
    let limit = (z1 * h(z2) - z2 * h(z1)) / (z1 - z2);
    if (limit - claimed).abs() > 1e-6 {
        return Err(Error::Inconsistency(format!("h(0) = {limit} from the closed form, {claimed} claimed")));
    }
    Ok(claimed)
}
