//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use opgf::genfun::{self, GenFunClosedForm};
use opgf::identities::{self, Sign};
use opgf::measures::{self, Family, FamilyParams, MeasureSpec, QuadratureRule, RuleKind};
use opgf::quad::BetaWeight;
use opgf::recurrence::{eval_monic, norm_squared, stieltjes_from_quadrature};
use opgf::riccati;

const LAMBDAS: [f64; 5] = [0.6, 0.75, 1.5, 2.0, 2.5];
const FREE_MEIXNER: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.25), (-1.0, -0.5)];
const REAL_Z: [f64; 6] = [-0.1, -0.05, -0.02, 0.02, 0.05, 0.1];

fn sweep() -> Vec<FamilyParams> {
    let mut out = Vec::new();
    for family in [Family::Sym1, Family::Sym2, Family::NonSymPlus, Family::NonSymMinus] {
        for l in LAMBDAS {
            out.push(FamilyParams::new(family, l, None, None).unwrap());
        }
    }
    for (a, b) in FREE_MEIXNER {
        out.push(FamilyParams::new(Family::FreeMeixner, 1.0, Some(a), Some(b)).unwrap());
    }
    out
}

fn label(p: &FamilyParams) -> String {
    if p.family == Family::FreeMeixner {
        format!("{} a={} b={}", p.family, p.a, p.b)
    } else {
        format!("{} lambda={}", p.family, p.lambda)
    }
}

/// Sixteen angles `(2k + 1) pi / 16 - pi` on the circle of radius `r`.
fn circle(r: f64) -> Vec<Complex64> {
    (0..16).map(|k| Complex64::from_polar(r, (2 * k + 1) as f64 * PI / 16.0 - PI)).collect()
}

struct Setup {
    params: FamilyParams,
    measure: MeasureSpec,
    cf: GenFunClosedForm,
}

fn setups() -> Vec<Setup> {
    sweep()
        .into_iter()
        .map(|params| Setup {
            params,
            measure: measures::measure_from_params(params).unwrap(),
            cf: genfun::closed_form_from_params(params).unwrap(),
        })
        .collect()
}

type Outcome = Result<String, String>;

fn worst(acc: &mut (f64, String), value: f64, what: impl FnOnce() -> String) {
    if !(value <= acc.0) {
        *acc = (value, what());
    }
}

fn within(acc: (f64, String), tol: f64) -> Outcome {
    if acc.0 <= tol {
        Ok(format!("max {:.3e} <= {tol:.0e}", acc.0))
    } else {
        Err(format!("max {:.3e} > {tol:.0e} at {}", acc.0, acc.1))
    }
}

fn criterion_1(setups: &[Setup]) -> Outcome {
    let start = Instant::now();
    let mut acc = (0.0, String::new());
    for s in setups {
        let seq = s.cf.sequence();
        for z in circle(0.1) {
            for x in s.measure.support.grid(11) {
                let closed = genfun::psi_closed(&s.cf, z, x).map_err(|e| format!("{}: {e}", label(&s.params)))?;
                let series = genfun::psi_series_adaptive(&seq, s.params.lambda, z, x).map_err(|e| e.to_string())?;
                worst(&mut acc, (series.value - closed).norm(), || format!("{} z={z} x={x}", label(&s.params)));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    within(acc, 1e-9).map(|m| format!("{m}, {} ms", elapsed.as_millis()))
}

fn criterion_2(setups: &[Setup]) -> Outcome {
    let (mut m0, mut m1, mut m2) = ((0.0, String::new()), (0.0, String::new()), (0.0, String::new()));
    for s in setups {
        for z in REAL_Z {
            let got = genfun::psi_family_moments(&s.measure, &s.cf, z, 24).map_err(|e| e.to_string())?;
            let want = genfun::expected_moments(s.params.lambda, s.cf.alpha1(), s.cf.omega2(), z);
            let at = || format!("{} z={z}", label(&s.params));
            worst(&mut m0, (got.m0 - want.m0).abs(), at);
            worst(&mut m1, (got.m1 - want.m1).abs(), at);
            worst(&mut m2, (got.m2 - want.m2).abs(), at);
        }
    }
    let a = within(m0, 1e-10)?;
    let b = within(m1, 1e-9)?;
    let c = within(m2, 1e-9)?;
    Ok(format!("m0 {a}; m1 {b}; m2 {c}"))
}

fn criterion_3(setups: &[Setup]) -> Outcome {
    let (mut rf, mut ru, mut ode) = ((0.0, String::new()), (0.0, String::new()), (0.0, String::new()));
    for s in setups {
        let k = riccati::coefficients(s.params.lambda, s.cf.alpha1(), s.cf.omega2());
        for z in circle(0.05).into_iter().chain(circle(0.1)) {
            let at = || format!("{} z={z}", label(&s.params));
            worst(&mut rf, riccati::residual_f(&s.cf, &k, z).map_err(|e| e.to_string())?.norm(), at);
            worst(&mut ru, riccati::residual_u(&s.cf, z).map_err(|e| e.to_string())?.norm(), at);
        }
        for z in REAL_Z {
            let (a, b) = riccati::residual_moment_ode(&s.cf, &s.measure, z, riccati::default_step(&s.cf))
                .map_err(|e| e.to_string())?;
            worst(&mut ode, a.max(b), || format!("{} z={z}", label(&s.params)));
        }
    }
    let a = within(rf, 1e-11)?;
    let b = within(ru, 1e-11)?;
    let c = within(ode, 1e-7)?;
    Ok(format!("residual_f {a}; residual_u {b}; moment ODE {c}"))
}

fn criterion_4() -> Outcome {
    let lambdas: Vec<f64> = (1..=20).map(|k| 0.55 + 2.45 * k as f64 / 20.0).collect();
    let mut acc = (0.0, String::new());
    let mut eq = (0.0, String::new());
    for &l in &lambdas {
        let sym = riccati::solve_symmetric(l).map_err(|e| e.to_string())?;
        let quad = riccati::symmetric_quadratic(l).map_err(|e| e.to_string())?;
        worst(&mut acc, (quad.discriminant - 9.0).abs(), || format!("discriminant at lambda={l}"));
        worst(&mut acc, (sym[0].omega2 - (2.0 * l + 1.0) / (l + 2.0)).abs(), || format!("sym branch 1 at {l}"));
        worst(&mut acc, (sym[1].omega2 - (2.0 * l - 1.0) / (l + 1.0)).abs(), || format!("sym branch 2 at {l}"));
        let non = riccati::solve_nonsymmetric(l).map_err(|e| e.to_string())?;
        for s in &non.solutions {
            let w = 2.0 * l.powi(3) / ((l + 1.0).powi(2) * (l - 0.5));
            let a2 = 2.0 / ((l + 1.0).powi(2) * (l - 0.5));
            worst(&mut acc, (s.omega2 - w).abs(), || format!("nonsym omega2 at {l}"));
            worst(&mut acc, (s.alpha1 * s.alpha1 - a2).abs(), || format!("nonsym alpha1^2 at {l}"));
            for (k, r) in s.equation_residuals.iter().enumerate() {
                worst(&mut eq, *r, || format!("z^{k} equation at lambda={l}"));
            }
        }
    }
    let a = within(acc, 1e-10)?;
    let b = within(eq, 1e-12)?;
    Ok(format!("closed forms {a}; equation residuals {b}; {} values of lambda", lambdas.len()))
}

/// Stieltjes input for a free Meixner law built from its density and atoms
/// rather than from its recurrence.
fn free_meixner_rule(a: f64, b: f64) -> Result<QuadratureRule, String> {
    let r = (1.0 + b).sqrt();
    let (lo, hi) = (a - 2.0 * r, a + 2.0 * r);
    let beta = BetaWeight::new(lo, hi, 0.5, 0.5);
    let (mut nodes, raw) = beta.discretize(24, 24);
    // sqrt(4(1 + b) - (x - a)^2) = 2r sqrt(1 - y^2), density divided by 2 pi (1 + a x + b x^2)
    let mut weights: Vec<f64> = nodes
        .iter()
        .zip(&raw)
        .map(|(x, w)| 2.0 * r * w / (2.0 * PI * (1.0 + a * x + b * x * x)))
        .collect();
    let (_, atoms) = measures::free_meixner_support(a, b);
    for atom in atoms {
        nodes.push(atom.location);
        weights.push(atom.mass);
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(format!("free Meixner law a={a} b={b} has mass {total}"));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(QuadratureRule { order: nodes.len(), nodes, weights, kind: RuleKind::Discretized })
}

fn criterion_5(setups: &[Setup]) -> Outcome {
    let mut acc = (0.0, String::new());
    for s in setups {
        let catalog = measures::sequence_for(&s.params);
        let rule = match s.params.family {
            Family::FreeMeixner => free_meixner_rule(s.params.a, s.params.b)?,
            _ => measures::discretized_rule(&s.measure).map_err(|e| e.to_string())?,
        };
        let stieltjes = stieltjes_from_quadrature(&rule, 9).map_err(|e| e.to_string())?;
        for n in 0..=8 {
            let at = || format!("{} n={n}", label(&s.params));
            worst(&mut acc, (stieltjes.alpha(n) - catalog.alpha(n)).abs(), at);
            worst(&mut acc, (stieltjes.omega(n) - catalog.omega(n)).abs(), at);
        }
        let solved = match s.params.family {
            Family::Sym1 | Family::Sym2 => riccati::solve_symmetric(s.params.lambda).map_err(|e| e.to_string())?,
            Family::NonSymPlus | Family::NonSymMinus => {
                riccati::solve_nonsymmetric(s.params.lambda).map_err(|e| e.to_string())?.solutions
            }
            Family::FreeMeixner => continue,
        };
        let sol = solved
            .iter()
            .find(|x| x.family == Some(s.params.family))
            .ok_or_else(|| format!("no solver branch for {}", label(&s.params)))?;
        let at = || format!("solver vs catalog, {}", label(&s.params));
        worst(&mut acc, (sol.alpha1 - catalog.alpha(1)).abs(), at);
        worst(&mut acc, (sol.omega2 - catalog.omega(2)).abs(), at);
        worst(&mut acc, (sol.alpha1 - stieltjes.alpha(1)).abs(), at);
        worst(&mut acc, (sol.omega2 - stieltjes.omega(2)).abs(), at);
    }
    within(acc, 1e-8)
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20_260_401);
    let mut acc = (0.0, String::new());
    for _ in 0..10 {
        let l = rng.gen_range(0.1..4.0);
        let a = rng.gen_range(-2.0..2.0);
        let w = rng.gen_range(0.1..3.0);
        for degree in 3..=6 {
            let forced = riccati::degree_bound_check(l, a, w, degree).map_err(|e| e.to_string())?;
            worst(&mut acc, forced, || format!("degree {degree} at ({l}, {a}, {w})"));
        }
    }
    if acc.0 == 0.0 {
        Ok("forced leading coefficient 0 for degrees 3-6 at 10 triples".into())
    } else {
        Err(format!("forced leading coefficient {:e} at {}", acc.0, acc.1))
    }
}

fn criterion_7() -> Outcome {
    let pairs = [
        (0.0, 0.0),
        (0.7, 0.3),
        (-1.0, -0.5),
        (0.5, 0.25),
        (2.0, -1.0),
        (-0.3, 1.5),
        (1.2, 0.0),
        (0.0, -1.0),
        (-2.5, 4.0),
        (0.1, -0.9),
    ];
    let mut acc = (0.0, String::new());
    for (a, b) in pairs {
        let s = riccati::free_meixner_uniqueness(a, b, 15).map_err(|e| e.to_string())?;
        worst(&mut acc, s.max_abs_coefficient(), || format!("a={a} b={b}"));
        worst(&mut acc, (s.h0 - a / 2.0).abs(), || format!("h0 at a={a} b={b}"));
    }
    within(acc, 1e-12)
}

fn criterion_8() -> Outcome {
    let e = |err: opgf::Error| err.to_string();
    let mut report = Vec::new();

    let mut dup = (0.0, String::new());
    for k in 1..=100 {
        let a = 0.05 * k as f64;
        worst(&mut dup, identities::duplication_check(a).map_err(e)?, || format!("a={a}"));
    }
    report.push(format!("duplication {}", within(dup, 1e-12)?));

    let mut ratio = (0.0, String::new());
    for l in [0.6, 0.75, 1.5, 1.7, 2.0, 2.5, 3.0] {
        for n in 0..=20 {
            worst(&mut ratio, identities::pochhammer_ratio_check(l, n).map_err(e)?, || format!("lambda={l} n={n}"));
        }
    }
    report.push(format!("pochhammer ratio {}", within(ratio, 1e-12)?));

    let mut binom = (0.0, String::new());
    for l in [0.6, 1.0, 1.5, 2.5] {
        for k in -6..=6 {
            let y = 0.1 * k as f64;
            worst(&mut binom, identities::one_f_zero_reduction(l, y).map_err(e)?, || format!("lambda={l} y={y}"));
        }
    }
    report.push(format!("1F0 {}", within(binom, 1e-11)?));

    let mut gf = (0.0, String::new());
    let unit: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
    for l in [0.6, 1.0, 1.5, 2.5] {
        for z in circle(0.1).into_iter().chain(circle(0.2)) {
            for &x in &unit {
                let r = identities::gegenbauer_gf_check(l, z, x, 80).map_err(e)?;
                worst(&mut gf, r.residual, || format!("gegenbauer lambda={l} z={z} x={x}"));
            }
        }
    }
    for l in LAMBDAS {
        let sym1 = measures::support_of(&FamilyParams::new(Family::Sym1, l, None, None).unwrap());
        let sym2 = measures::support_of(&FamilyParams::new(Family::Sym2, l, None, None).unwrap());
        for z in circle(0.1) {
            for x in sym1.grid(11) {
                let r = identities::tilde_gegenbauer_identity(l, z, x).map_err(e)?;
                worst(&mut gf, r.residual, || format!("tilde gegenbauer lambda={l} z={z} x={x}"));
            }
            for x in sym2.grid(11) {
                let r = identities::family2_identity(l, z, x).map_err(e)?;
                worst(&mut gf, r.residual, || format!("family 2 lambda={l} z={z} x={x}"));
            }
        }
        for k in -5..=5 {
            let t = 0.05 * k as f64;
            for &y in &unit[1..10] {
                let r = identities::jacobi_2f1_gf_check(l, t, y).map_err(e)?;
                worst(&mut gf, r.residual, || format!("jacobi 2F1 lambda={l} t={t} y={y}"));
            }
        }
        for sign in [Sign::Plus, Sign::Minus] {
            let support = measures::support_of(&FamilyParams::new(sign.family(), l, None, None).unwrap());
            let zs: Vec<Complex64> = circle(0.1).into_iter().chain(REAL_Z.map(|t| Complex64::new(t, 0.0))).collect();
            for z in zs {
                for x in support.grid(11) {
                    let r = identities::gf3_equivalence(l, z, x, sign).map_err(e)?;
                    worst(&mut gf, r, || format!("GF3 {sign:?} lambda={l} z={z} x={x}"));
                }
            }
        }
    }
    report.push(format!("generating functions {}", within(gf, 1e-10)?));

    let mut shift = (0.0, String::new());
    for l in LAMBDAS {
        for sign in [Sign::Plus, Sign::Minus] {
            let support = measures::support_of(&FamilyParams::new(sign.family(), l, None, None).unwrap());
            for n in 0..=10 {
                for x in support.grid(11) {
                    let r = identities::jacobi_shift_check(l, n, x, sign).map_err(e)?;
                    worst(&mut shift, r, || format!("{sign:?} lambda={l} n={n} x={x}"));
                }
            }
        }
    }
    report.push(format!("jacobi shift {}", within(shift, 1e-9)?));
    Ok(report.join("; "))
}

fn criterion_9(setups: &[Setup]) -> Outcome {
    let mut off = (0.0, String::new());
    let mut diag = (0.0, String::new());
    let mut shifted: f64 = 0.0;
    for s in setups {
        let rule = measures::gauss_quadrature(&s.measure, 24).map_err(|e| e.to_string())?;
        let seq = s.cf.sequence();
        let tables: Vec<_> = rule.nodes.iter().map(|x| eval_monic(&seq, 10, *x).unwrap()).collect();
        let inner = |m: usize, n: usize| -> f64 {
            tables.iter().zip(&rule.weights).map(|(t, w)| w * t.get(m) * t.get(n)).sum()
        };
        for m in 0..=10 {
            let nm = inner(m, m);
            worst(&mut diag, (nm / norm_squared(&seq, m) - 1.0).abs(), || format!("{} n={m}", label(&s.params)));
            if m > 0 {
                shifted = shifted.max((nm / norm_squared(&seq, m - 1) - 1.0).abs());
            }
            for n in 0..m {
                let r = inner(m, n).abs() / (nm * inner(n, n)).sqrt();
                worst(&mut off, r, || format!("{} m={m} n={n}", label(&s.params)));
            }
        }
    }
    let a = within(off, 1e-9)?;
    let b = within(diag, 1e-8)?;
    Ok(format!("off-diagonal {a}; norms omega_0..omega_n {b} (omega_0..omega_(n-1) is off by up to {shifted:.2e})"))
}

fn criterion_10() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_opgf");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    for (i, p) in sweep().iter().enumerate() {
        let out = dir.path().join(format!("report{i}.json"));
        let mut cmd = Command::new(exe);
        cmd.env("OPGF_THREADS", "1")
            .args(["verify", "--family", p.family.name(), "--zmax", "0.1", "--grid", "16", "--tol", "1e-9"])
            .arg("--out")
            .arg(&out);
        if p.family == Family::FreeMeixner {
            cmd.args(["--a", &p.a.to_string(), "--b", &p.b.to_string()]);
        } else {
            cmd.args(["--lambda", &p.lambda.to_string()]);
        }
        let output = cmd.output().map_err(|e| e.to_string())?;
        if output.status.code() != Some(0) {
            return Err(format!(
                "{} exited with {:?}: {}",
                label(p),
                output.status.code(),
                String::from_utf8_lossy(&output.stderr)
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("sweep took {elapsed:?}"));
    }
    Ok(format!("{} runs, exit 0, {} ms single-threaded", sweep().len(), elapsed.as_millis()))
}

fn main() {
    let setups = setups();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "generating-function identity", criterion_1(&setups)),
        (2, "psi-family moments", criterion_2(&setups)),
        (3, "Riccati and moment-ODE residuals", criterion_3(&setups)),
        (4, "classification reproduction", criterion_4()),
        (5, "recurrence cross-validation", criterion_5(&setups)),
        (6, "degree bound", criterion_6()),
        (7, "free Meixner uniqueness", criterion_7()),
        (8, "identity suite", criterion_8()),
        (9, "orthogonality", criterion_9(&setups)),
        (10, "verify campaign", criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
