//! Special-function identities behind the closed forms: Pochhammer symbols,
//! the Gauss duplication formula, the binomial series and the Gegenbauer and
//! Jacobi generating functions.
//!
//! Every check returns a residual; the caller decides the tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::genfun::{self, principal_pow, SeriesValue};
use crate::measures::{self, Family, FamilyParams, QuadratureRule, RuleKind};
use crate::quad::BetaWeight;
use crate::recurrence::{eval_monic, stieltjes_from_quadrature, JacobiSzegoSequence};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Gamma(x)|` by the Lanczos approximation, with reflection below 1/2.
/// Poles return `+inf`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Rising factorial `(lambda)_n = lambda (lambda + 1) ... (lambda + n - 1)`.
pub fn pochhammer(lambda: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (lambda + k as f64))
}

/// `(lambda)_n / n!`, accumulated as a product of ratios so that it does not
/// overflow for large `n`.
pub fn pochhammer_over_factorial(lambda: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (lambda + k as f64) / (k as f64 + 1.0))
}

/// `|ln(sqrt(pi) Gamma(2a)) - ln(2^(2a-1) Gamma(a) Gamma(a + 1/2))|`.
pub fn duplication_check(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Parameter(format!("duplication check needs a > 0, got {a}")));
    }
    let lhs = 0.5 * std::f64::consts::PI.ln() + ln_gamma(2.0 * a);
    let rhs = (2.0 * a - 1.0) * std::f64::consts::LN_2 + ln_gamma(a) + ln_gamma(a + 0.5);
    Ok((lhs - rhs).abs())
}

/// Relative difference between `(2 lambda - 1)_{2n} / (lambda - 1/2)_n` and
/// `4^n (lambda)_n`.
pub fn pochhammer_ratio_check(lambda: f64, n: u32) -> Result<f64> {
    if !(lambda > 0.5) {
        return Err(Error::Parameter(format!("lambda must be > 1/2, got {lambda}")));
    }
    let lhs = pochhammer(2.0 * lambda - 1.0, 2 * n) / pochhammer(lambda - 0.5, n);
    let rhs = 4f64.powi(n as i32) * pochhammer(lambda, n);
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// `|sum (lambda)_n y^n / n! - (1 - y)^(-lambda)|`, summing until three
/// consecutive terms are negligible.
pub fn one_f_zero_reduction(lambda: f64, y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("binomial series needs |y| < 1, got {y}")));
    }
    let closed = (1.0 - y).powf(-lambda);
    let mut sum = 0.0f64;
    let mut term = 1.0f64;
    let mut small = 0;
    for n in 0..100_000u32 {
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            small += 1;
            if small == 3 {
                return Ok((sum - closed).abs());
            }
        } else {
            small = 0;
        }
        term *= (lambda + n as f64) * y / (n as f64 + 1.0);
    }
    Err(Error::Integration(format!("binomial series at y = {y} did not converge")))
}

/// A residual together with the convergence warning of the series behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub residual: f64,
    pub warning: Option<String>,
}

impl IdentityResidual {
    fn new(series: SeriesValue, closed: Complex64) -> Self {
        IdentityResidual { residual: (series.value - closed).norm(), warning: series.warning }
    }
}

/// `sum 2^n (lambda)_n / n! C_n(x) z^n` against `(1 - 2zx + z^2)^(-lambda)`,
/// with `C_n` the monic Gegenbauer polynomials on `[-1, 1]`.
pub fn gegenbauer_gf_check(lambda: f64, z: Complex64, x: f64, n_terms: usize) -> Result<IdentityResidual> {
    if !(lambda > -0.5) {
        return Err(Error::Parameter(format!("Gegenbauer parameter must be > -1/2, got {lambda}")));
    }
    if x.abs() > 1.0 || z.norm() > 0.3 {
        return Err(Error::Domain(format!("need |x| <= 1 and |z| <= 0.3, got x = {x}, z = {z}")));
    }
    let seq = JacobiSzegoSequence::classical_gegenbauer(lambda);
    let series = genfun::psi_series(&seq, lambda, z * 2.0, x, n_terms)?;
    let closed = principal_pow(1.0 - z * (2.0 * x) + z * z, -lambda);
    Ok(IdentityResidual::new(series, closed))
}

/// `sum (lambda)_n / n! s^n C_n^mu(x / s) z^n` with `s = sqrt(2 (1 + mu))`,
/// summed adaptively. The series coefficient and the polynomial parameter
/// are allowed to differ.
fn scaled_gegenbauer_series(lambda: f64, mu: f64, z: Complex64, x: f64) -> Result<SeriesValue> {
    let s = (2.0 * (1.0 + mu)).sqrt();
    let seq = JacobiSzegoSequence::classical_gegenbauer(mu);
    genfun::psi_series_adaptive(&seq, lambda, z * s, x / s)
}

/// The rescaled Gegenbauer series against `(1 - zx + (1 + lambda) z^2 / 2)^(-lambda)`.
pub fn tilde_gegenbauer_identity(lambda: f64, z: Complex64, x: f64) -> Result<IdentityResidual> {
    let params = FamilyParams::new(Family::Sym1, lambda, None, None)?;
    let support = measures::support_of(&params);
    if !support.contains(x) {
        return Err(Error::Domain(format!("x = {x} outside [{}, {}]", support.lo, support.hi)));
    }
    let series = scaled_gegenbauer_series(lambda, lambda, z, x)?;
    let closed = principal_pow(1.0 - z * x + z * z * (0.5 * (1.0 + lambda)), -lambda);
    Ok(IdentityResidual::new(series, closed))
}

/// `sum (lambda)_n / n! C~_n^(lambda - 1)(x) z^n` against
/// `(1 - lambda z^2 / 2) / (1 - zx + lambda z^2 / 2)^lambda`.
pub fn family2_identity(lambda: f64, z: Complex64, x: f64) -> Result<IdentityResidual> {
    let params = FamilyParams::new(Family::Sym2, lambda, None, None)?;
    let support = measures::support_of(&params);
    if !support.contains(x) {
        return Err(Error::Domain(format!("x = {x} outside [{}, {}]", support.lo, support.hi)));
    }
    let series = scaled_gegenbauer_series(lambda, lambda - 1.0, z, x)?;
    let closed = (1.0 - z * z * (0.5 * lambda)) * principal_pow(1.0 - z * x + z * z * (0.5 * lambda), -lambda);
    Ok(IdentityResidual::new(series, closed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn family(self) -> Family {
        match self {
            Sign::Plus => Family::NonSymPlus,
            Sign::Minus => Family::NonSymMinus,
        }
    }
}

fn nonsym_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.5) {
        return Err(Error::Parameter(format!("lambda must be > 1/2, got {lambda}")));
    }
    if (lambda - 1.0).abs() < measures::LAMBDA_ONE_BAND {
        return Err(Error::Redirect("lambda = 1 is the free Meixner case".into()));
    }
    Ok((2.0 * lambda - 1.0).sqrt())
}

/// Compares `P_n(x)` of the non-symmetric family with the affine image of
/// the monic Jacobi polynomial: `(2 lambda / s)^n p_n^(lambda - 1/2, lambda - 3/2)((s x - 1) / (2 lambda))`
/// for the plus sign, and the reflected `p_n^(lambda - 3/2, lambda - 1/2)((s x + 1) / (2 lambda))`
/// for the minus sign. Returns `|difference| / max(1, |jacobi side|)`.
pub fn jacobi_shift_check(lambda: f64, n: usize, x: f64, sign: Sign) -> Result<f64> {
    let s = nonsym_lambda(lambda)?;
    if n > 10 {
        return Err(Error::Precondition(format!("degree {n} exceeds 10")));
    }
    let params = FamilyParams::new(sign.family(), lambda, None, None)?;
    let support = measures::support_of(&params);
    if !support.contains(x) {
        return Err(Error::Domain(format!("x = {x} outside [{}, {}]", support.lo, support.hi)));
    }
    let direct = eval_monic(&measures::sequence_for(&params), n, x)?.get(n);
    let (a, b) = (lambda - 0.5, lambda - 1.5);
    let (jacobi, y) = match sign {
        Sign::Plus => (JacobiSzegoSequence::classical_jacobi(a, b), (s * x - 1.0) / (2.0 * lambda)),
        Sign::Minus => (JacobiSzegoSequence::classical_jacobi(b, a), (s * x + 1.0) / (2.0 * lambda)),
    };
    let shifted = (2.0 * lambda / s).powi(n as i32) * eval_monic(&jacobi, n, y)?.get(n);
    Ok((direct - shifted).abs() / shifted.abs().max(1.0))
}

/// `(1 + t) / (1 + t^2 - 2ty)^lambda`.
pub fn jacobi_2f1_closed(lambda: f64, t: Complex64, y: f64) -> Complex64 {
    (1.0 + t) * principal_pow(1.0 + t * t - t * (2.0 * y), -lambda)
}

/// `sum (lambda)_n / n! p_n^(lambda - 1/2, lambda - 3/2)(y) (2t)^n` against
/// [`jacobi_2f1_closed`], with `p_n` monic Jacobi on `[-1, 1]`.
pub fn jacobi_2f1_gf_check(lambda: f64, t: f64, y: f64) -> Result<IdentityResidual> {
    if !(lambda > 0.5) {
        return Err(Error::Parameter(format!("lambda must be > 1/2, got {lambda}")));
    }
    if !(t.abs() < 0.3 && y.abs() < 1.0) {
        return Err(Error::Domain(format!("need |t| < 0.3 and |y| < 1, got t = {t}, y = {y}")));
    }
    let seq = JacobiSzegoSequence::classical_jacobi(lambda - 0.5, lambda - 1.5);
    let t = Complex64::new(t, 0.0);
    let series = genfun::psi_series_adaptive(&seq, lambda, t * 2.0, y)?;
    Ok(IdentityResidual::new(series, jacobi_2f1_closed(lambda, t, y)))
}

/// The factored generating function of the non-symmetric families,
/// `sigma (lambda / s) (z + sigma s / lambda) [1 - z (x - sigma / s) + lambda^2 z^2 / (2 lambda - 1)]^(-lambda)`.
pub fn gf3_closed(lambda: f64, z: Complex64, x: f64, sign: Sign) -> Result<Complex64> {
    let s = nonsym_lambda(lambda)?;
    let sigma = sign.value();
    let prefactor = (z + sigma * s / lambda) * (sigma * lambda / s);
    let base = 1.0 - z * (x - sigma / s) + z * z * (lambda * lambda / (2.0 * lambda - 1.0));
    Ok(prefactor * principal_pow(base, -lambda))
}

/// `|gf3_closed - psi|` where `psi` is the closed form of the matching
/// non-symmetric family (its analytic continuation on the negative axis).
pub fn gf3_equivalence(lambda: f64, z: Complex64, x: f64, sign: Sign) -> Result<f64> {
    let factored = gf3_closed(lambda, z, x, sign)?;
    let cf = genfun::closed_form(sign.family(), lambda, None, None)?;
    let psi = if cf.excludes_negative_axis && z.im == 0.0 && z.re < 0.0 {
        genfun::psi_continuous(&cf, z, x)?
    } else {
        genfun::psi_closed(&cf, z, x)?
    };
    Ok((factored - psi).norm())
}

/// Generalized binomial coefficient `C(top, k)`.
fn binomial(top: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (top - k as f64 + i as f64) / i as f64)
}

/// The classical Jacobi polynomial `P_n^(alpha, beta)(y)` from its explicit
/// sum.
pub fn jacobi_classical(alpha: f64, beta: f64, n: usize, y: f64) -> f64 {
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            binomial(nf + alpha, n - k)
                * binomial(nf + beta, k)
                * (0.5 * (y - 1.0)).powi(k as i32)
                * (0.5 * (y + 1.0)).powi((n - k) as i32)
        })
        .sum()
}

/// Relative difference between `P_n^(alpha, beta)(y)` and
/// `(n + alpha + beta + 1)_n / (2^n n!)` times the monic polynomial.
pub fn jacobi_normalization_check(alpha: f64, beta: f64, n: usize, y: f64) -> Result<f64> {
    if n > 5 {
        return Err(Error::Precondition(format!("normalization constant is checked for n <= 5, got {n}")));
    }
    let lead = pochhammer_over_factorial(n as f64 + alpha + beta + 1.0, n as u32) / 2f64.powi(n as i32);
    let monic = eval_monic(&JacobiSzegoSequence::classical_jacobi(alpha, beta), n, y)?.get(n);
    let classical = jacobi_classical(alpha, beta, n, y);
    Ok((lead * monic - classical).abs() / classical.abs().max(1.0))
}

/// Largest disagreement in `alpha_n`, `omega_n` (`n <= n_max`) between the
/// classical monic Jacobi formulas and the Stieltjes procedure run on a
/// discretization of `(1 - y)^alpha (1 + y)^beta`.
pub fn classical_recurrence_crosscheck(alpha: f64, beta: f64, n_max: usize) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Parameter(format!("Jacobi exponents must exceed -1, got ({alpha}, {beta})")));
    }
    let (nodes, mut weights) = BetaWeight::new(-1.0, 1.0, alpha, beta).discretize(24, 24);
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let rule = QuadratureRule { order: nodes.len(), nodes, weights, kind: RuleKind::Discretized };
    let stieltjes = stieltjes_from_quadrature(&rule, n_max + 1)?;
    let classical = JacobiSzegoSequence::classical_jacobi(alpha, beta);
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        worst = worst.max((stieltjes.alpha(n) - classical.alpha(n)).abs());
        if n >= 1 {
            worst = worst.max((stieltjes.omega(n) - classical.omega(n)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ln_gamma_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-13);
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!((ln_gamma(-0.5) - (2.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-14);
        assert!(ln_gamma(0.0).is_infinite());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(3.7, 0), 1.0);
        assert_eq!(pochhammer(2.0, 3), 24.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
        assert_eq!(pochhammer_over_factorial(2.0, 3), 4.0);
        for n in 0..20 {
            let l = 1.3;
            assert_eq!(pochhammer(l, n + 1), (l + n as f64) * pochhammer(l, n));
        }
    }

    #[test]
    fn duplication_and_ratio() {
        assert!(duplication_check(1.0).unwrap() < 1e-15);
        assert!(duplication_check(2.5).unwrap() < 1e-13);
        assert!(duplication_check(0.75).unwrap() < 1e-13);
        assert!(duplication_check(0.0).is_err());
        assert_eq!(pochhammer_ratio_check(1.3, 0).unwrap(), 0.0);
        assert!(pochhammer_ratio_check(1.0, 2).unwrap() < 1e-15);
        assert!(pochhammer_ratio_check(1.7, 10).unwrap() < 1e-12);
    }

    #[test]
    fn binomial_series() {
        assert_eq!(one_f_zero_reduction(3.0, 0.0).unwrap(), 0.0);
        assert!(one_f_zero_reduction(1.0, 0.5).unwrap() < 1e-15);
        assert!(one_f_zero_reduction(2.5, -0.3).unwrap() < 1e-12);
        assert!(matches!(one_f_zero_reduction(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gegenbauer_family() {
        assert_eq!(gegenbauer_gf_check(1.5, c(0.0, 0.0), 0.3, 5).unwrap().residual, 0.0);
        assert!(gegenbauer_gf_check(1.0, c(0.2, 0.0), 0.5, 60).unwrap().residual < 1e-11);
        assert!(gegenbauer_gf_check(2.5, c(0.1, 0.0), -0.8, 60).unwrap().residual < 1e-11);
        assert!(tilde_gegenbauer_identity(2.0, c(0.0, 0.0), 1.0).unwrap().residual == 0.0);
        let r = tilde_gegenbauer_identity(2.0, c(0.1, 0.0), 1.0).unwrap();
        assert!(r.residual < 1e-11 && r.warning.is_none());
        let cf = genfun::closed_form(Family::Sym1, 2.0, None, None).unwrap();
        let psi = genfun::psi_closed(&cf, c(0.1, 0.0), 1.0).unwrap();
        assert!((psi - principal_pow(c(1.0 - 0.1 + 0.015, 0.0), -2.0)).norm() < 1e-15);
        assert!(tilde_gegenbauer_identity(0.7, c(0.0, 0.05), -1.0).unwrap().residual < 1e-11);
        assert!(family2_identity(2.0, c(0.1, 0.0), 0.0).unwrap().residual < 1e-11);
        assert!(family2_identity(1.5, c(-0.08, 0.0), 1.0).unwrap().residual < 1e-11);
        assert!(family2_identity(0.75, c(0.05, 0.05), 0.4).unwrap().residual < 1e-11);
        assert!(matches!(family2_identity(1.0, c(0.1, 0.0), 0.0), Err(Error::Redirect(_))));
    }

    #[test]
    fn jacobi_shift() {
        assert_eq!(jacobi_shift_check(2.0, 0, 0.3, Sign::Plus).unwrap(), 0.0);
        assert!(jacobi_shift_check(2.0, 1, 0.3, Sign::Plus).unwrap() < 1e-15);
        for n in 0..=10 {
            assert!(jacobi_shift_check(1.8, n, -0.4, Sign::Minus).unwrap() < 1e-9);
            assert!(jacobi_shift_check(0.7, n, 0.9, Sign::Plus).unwrap() < 1e-9);
        }
        assert!(matches!(jacobi_shift_check(1.8, 11, 0.0, Sign::Plus), Err(Error::Precondition(_))));
    }

    #[test]
    fn jacobi_generating_function() {
        assert_eq!(jacobi_2f1_gf_check(2.0, 0.0, 0.3).unwrap().residual, 0.0);
        assert!(jacobi_2f1_gf_check(2.0, 0.1, 0.5).unwrap().residual < 1e-11);
        assert!(jacobi_2f1_gf_check(0.9, -0.15, -0.4).unwrap().residual < 1e-11);
        // the variant with (1 + t)^2 in the numerator is not the same function
        let t = c(0.1, 0.0);
        let closed = jacobi_2f1_closed(2.0, t, 0.5);
        assert!((closed * (1.0 + t) - closed).norm() > 1e-3);
    }

    #[test]
    fn gf3_matches_closed_form() {
        assert!(gf3_equivalence(2.0, c(0.1, 0.0), 0.0, Sign::Plus).unwrap() < 1e-13);
        assert!(gf3_equivalence(1.2, c(-0.05, 0.0), 1.0, Sign::Plus).unwrap() < 1e-13);
        assert!(gf3_equivalence(1.2, c(0.04, -0.07), 0.5, Sign::Minus).unwrap() < 1e-13);
        assert!((gf3_closed(2.0, c(1e-12, 0.0), 0.3, Sign::Minus).unwrap() - 1.0).norm() < 1e-11);
        // substitution y = (s x - 1) / (2 lambda), t = lambda z / s
        let (l, x, z) = (1.6f64, 0.2, c(0.06, 0.03));
        let s = (2.0 * l - 1.0).sqrt();
        let chain = jacobi_2f1_closed(l, z * (l / s), (s * x - 1.0) / (2.0 * l));
        assert!((chain - gf3_closed(l, z, x, Sign::Plus).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn normalization_constant() {
        for n in 0..=5 {
            assert!(jacobi_normalization_check(0.5, -0.5, n, 0.3).unwrap() < 1e-13);
            assert!(jacobi_normalization_check(1.2, 2.0, n, -0.7).unwrap() < 1e-13);
        }
        // P_1^(a,b)(y) = (a - b)/2 + (a + b + 2) y / 2
        let p1 = jacobi_classical(1.0, 0.0, 1, 0.5);
        assert!((p1 - (0.5 + 1.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn classical_recurrences_match_stieltjes() {
        for (a, b) in [(0.5, -0.5), (1.5, 0.5), (-0.3, 2.0), (0.0, 0.0)] {
            assert!(classical_recurrence_crosscheck(a, b, 8).unwrap() < 1e-10, "({a}, {b})");
        }
    }
}
