//! The `opgf` command line: `verify`, `classify` and `quadrature`.
//!
//! Exit codes: 0 success, 1 a check failed (the report is still written),
//! 2 invalid parameters, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::Error;
use crate::genfun::{self, GenFunClosedForm};
use crate::identities::{self, Sign};
use crate::measures::{self, sig17, Family, FamilyParams, MeasureSpec};
use crate::recurrence::{eval_monic, norm_squared};
use crate::riccati;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "OPGF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "opgf", version, about = "Verify generating functions of ultraspherical type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check for one family and write a JSON report.
    Verify(VerifyArgs),
    /// Solve the polynomial classification problem at one lambda.
    Classify(ClassifyArgs),
    /// Write the Gauss rule of a family as CSV.
    Quadrature(QuadratureArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Largest |z| on the grid.
    #[arg(long, default_value_t = 0.1)]
    pub zmax: f64,
    /// Angles per half circle.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Tolerance of the series and moment checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID, message: message.into() }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError { code: EXIT_IO, message: format!("cannot write {}: {err}", path.display()) }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidInput(_) | Error::Parameter(_) | Error::Redirect(_) | Error::Precondition(_) => EXIT_INVALID,
            _ => EXIT_CHECK_FAILED,
        };
        CliError { code, message: err.to_string() }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Quadrature(args) => cmd_quadrature(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    }
}

fn family_params(args: &FamilyArgs) -> Result<FamilyParams, CliError> {
    let family: Family = args.family.parse()?;
    let lambda = match (family, args.lambda) {
        (_, Some(l)) => l,
        (Family::FreeMeixner, None) => 1.0,
        (_, None) => return Err(CliError::invalid(format!("--lambda is required for {family}"))),
    };
    Ok(FamilyParams::new(family, lambda, args.a, args.b)?)
}

/// Runs `f` on a pool capped by `OPGF_THREADS`.
fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .map_err(|_| CliError::invalid(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
        if n == 0 {
            return Err(CliError::invalid(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError { code: EXIT_CHECK_FAILED, message: format!("thread pool: {e}") })?;
    Ok(pool.install(f))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents.as_bytes()),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn num<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?.serialize(s)
    } else {
        s.serialize_none()
    }
}

fn nums<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        let raw: Option<Box<RawValue>> = if x.is_finite() {
            Some(RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?)
        } else {
            None
        };
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

fn opt_num<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => num(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub points_tested: usize,
    #[serde(serialize_with = "num")]
    pub max_residual: f64,
    #[serde(serialize_with = "num")]
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    fn new(name: &str, tolerance: f64, outcome: Result<(usize, f64), Error>) -> Self {
        match outcome {
            Ok((points, max)) => CheckResult {
                name: name.to_string(),
                points_tested: points,
                max_residual: max,
                tolerance,
                passed: max <= tolerance,
                error: None,
            },
            Err(err) => CheckResult {
                name: name.to_string(),
                points_tested: 0,
                max_residual: f64::NAN,
                tolerance,
                passed: false,
                error: Some(err.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool_version: String,
    pub family: String,
    #[serde(serialize_with = "num")]
    pub lambda: f64,
    #[serde(serialize_with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(serialize_with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(serialize_with = "num")]
    pub zmax: f64,
    pub grid: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Tolerances of the checks whose contract is fixed by the library.
pub const TOL_RESIDUAL_F: f64 = 1e-11;
pub const TOL_RESIDUAL_U: f64 = 1e-11;
pub const TOL_MOMENT_ODE: f64 = 1e-7;
pub const TOL_IDENTITY: f64 = 1e-10;
pub const TOL_GF3: f64 = 1e-12;
pub const TOL_JACOBI_SHIFT: f64 = 1e-9;
pub const TOL_CLASSIFICATION: f64 = 1e-8;
pub const TOL_UNIQUENESS: f64 = 1e-12;
pub const TOL_ORTHOGONALITY: f64 = 1e-9;
pub const TOL_NORMS: f64 = 1e-8;
pub const TOL_H_INITIAL: f64 = 1e-6;

/// Points `r e^{i k pi / grid}` for `r in {zmax / 2, zmax}` and
/// `|k| < grid`, so that the negative axis is never hit.
pub fn z_grid(zmax: f64, grid: usize) -> Vec<Complex64> {
    let g = grid as i64;
    let mut points = Vec::new();
    for r in [0.5 * zmax, zmax] {
        for k in -(g - 1)..=(g - 1) {
            points.push(Complex64::from_polar(r, k as f64 * std::f64::consts::PI / grid as f64));
        }
    }
    points
}

/// Real points `+-zmax / 5`, `+-zmax / 2`, `+-zmax`.
pub fn real_grid(zmax: f64) -> Vec<f64> {
    let mut points = Vec::new();
    for f in [0.2, 0.5, 1.0] {
        points.push(-f * zmax);
        points.push(f * zmax);
    }
    points
}

/// Maximum of `f` over `points`, evaluated in parallel.
fn par_max<T: Sync>(points: &[T], f: impl Fn(&T) -> Result<f64, Error> + Sync) -> Result<(usize, f64), Error> {
    let values: Vec<Result<f64, Error>> = points.par_iter().map(&f).collect();
    let mut worst: f64 = 0.0;
    for v in values {
        let v = v?;
        worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
    }
    Ok((points.len(), worst))
}

struct Campaign<'a> {
    params: FamilyParams,
    measure: &'a MeasureSpec,
    cf: &'a GenFunClosedForm,
    zs: Vec<Complex64>,
    xs: Vec<f64>,
    reals: Vec<f64>,
    tol: f64,
}

impl Campaign<'_> {
    fn pairs(&self) -> Vec<(Complex64, f64)> {
        self.zs.iter().flat_map(|z| self.xs.iter().map(move |x| (*z, *x))).collect()
    }

    fn series(&self) -> CheckResult {
        let seq = self.cf.sequence();
        let l = self.params.lambda;
        let outcome = par_max(&self.pairs(), |(z, x)| {
            let closed = genfun::psi_closed(self.cf, *z, *x)?;
            let series = genfun::psi_series_adaptive(&seq, l, *z, *x)?;
            Ok((series.value - closed).norm() / (1.0 + closed.norm()))
        });
        CheckResult::new("series_vs_closed_form", self.tol, outcome)
    }

    fn moments(&self) -> CheckResult {
        let l = self.params.lambda;
        let outcome = par_max(&self.reals, |z| {
            let m = genfun::psi_family_moments(self.measure, self.cf, *z, 24)?;
            let e = genfun::expected_moments(l, self.cf.alpha1(), self.cf.omega2(), *z);
            Ok((m.m0 - e.m0).abs().max((m.m1 - e.m1).abs()).max((m.m2 - e.m2).abs()))
        });
        CheckResult::new("moment_claim", self.tol, outcome)
    }

    fn riccati_f(&self) -> CheckResult {
        let k = riccati::coefficients(self.params.lambda, self.cf.alpha1(), self.cf.omega2());
        let outcome = par_max(&self.zs, |z| Ok(riccati::residual_f(self.cf, &k, *z)?.norm()));
        CheckResult::new("residual_f", TOL_RESIDUAL_F, outcome)
    }

    fn riccati_u(&self) -> CheckResult {
        let outcome = par_max(&self.zs, |z| Ok(riccati::residual_u(self.cf, *z)?.norm()));
        CheckResult::new("residual_u", TOL_RESIDUAL_U, outcome)
    }

    fn moment_ode(&self) -> CheckResult {
        let step = riccati::default_step(self.cf);
        let outcome = par_max(&self.reals, |z| {
            let (r1, r2) = riccati::residual_moment_ode(self.cf, self.measure, *z, step)?;
            Ok(r1.max(r2))
        });
        CheckResult::new("residual_moment_ode", TOL_MOMENT_ODE, outcome)
    }

    /// Off-diagonal inner products relative to the norms, and the norms
    /// relative to `omega_0 ... omega_{n-1}`, under a 24-node Gauss rule.
    fn orthogonality(&self) -> Vec<CheckResult> {
        let gram = (|| {
            let rule = measures::gauss_quadrature(self.measure, 24)?;
            let seq = self.cf.sequence();
            let tables = rule.nodes.iter().map(|x| eval_monic(&seq, 10, *x)).collect::<Result<Vec<_>, _>>()?;
            let inner = |m: usize, n: usize| -> f64 {
                tables.iter().zip(&rule.weights).map(|(t, w)| w * t.get(m) * t.get(n)).sum()
            };
            // the two-point law (b = -1) only carries P_0 and P_1
            let top = if self.params.family == Family::FreeMeixner && self.params.b == -1.0 { 1 } else { 10 };
            let (mut off, mut diag, mut pairs) = (0.0f64, 0.0f64, 0);
            for m in 0..=top {
                let nm = inner(m, m);
                diag = diag.max((nm / norm_squared(&seq, m) - 1.0).abs());
                for n in 0..m {
                    off = off.max(inner(m, n).abs() / (nm * inner(n, n)).sqrt());
                    pairs += 1;
                }
            }
            Ok((pairs, off, diag, top + 1))
        })();
        vec![
            CheckResult::new("orthogonality", TOL_ORTHOGONALITY, gram.clone().map(|(p, off, _, _)| (p, off))),
            CheckResult::new("norms", TOL_NORMS, gram.map(|(_, _, diag, count)| (count, diag))),
        ]
    }

    fn classification(&self) -> CheckResult {
        let l = self.params.lambda;
        let outcome = (|| {
            let solutions = match self.params.family {
                Family::Sym1 | Family::Sym2 => riccati::solve_symmetric(l)?,
                Family::NonSymPlus | Family::NonSymMinus => riccati::solve_nonsymmetric(l)?.solutions,
                Family::FreeMeixner => {
                    let p = riccati::identify_family(l, self.cf.alpha1(), self.cf.omega2())?;
                    return Ok((1, (p.a - self.params.a).abs().max((p.b - self.params.b).abs())));
                }
            };
            let sol = solutions
                .iter()
                .find(|s| s.family == Some(self.params.family))
                .ok_or_else(|| Error::Inconsistency(format!("no solver branch for {}", self.params.family)))?;
            let diff = (sol.omega2 - self.cf.omega2()).abs().max((sol.alpha1 - self.cf.alpha1()).abs());
            Ok((solutions.len(), diff))
        })();
        CheckResult::new("classification_matches_catalog", TOL_CLASSIFICATION, outcome)
    }

    fn h_initial(&self) -> CheckResult {
        let outcome = riccati::h_lambda_initial(self.params.lambda, self.cf.alpha1(), self.cf.omega2())
            .map(|h| (1, (h - 0.5 * self.params.lambda * self.cf.alpha1()).abs()));
        CheckResult::new("h_lambda_initial", TOL_H_INITIAL, outcome)
    }

    fn identities(&self) -> Vec<CheckResult> {
        let l = self.params.lambda;
        match self.params.family {
            Family::Sym1 => {
                let outcome = par_max(&self.pairs(), |(z, x)| Ok(identities::tilde_gegenbauer_identity(l, *z, *x)?.residual));
                vec![CheckResult::new("tilde_gegenbauer_identity", TOL_IDENTITY, outcome)]
            }
            Family::Sym2 => {
                let outcome = par_max(&self.pairs(), |(z, x)| Ok(identities::family2_identity(l, *z, *x)?.residual));
                vec![CheckResult::new("family2_identity", TOL_IDENTITY, outcome)]
            }
            Family::NonSymPlus | Family::NonSymMinus => {
                let sign = if self.params.family == Family::NonSymPlus { Sign::Plus } else { Sign::Minus };
                let gf3 = par_max(&self.pairs(), |(z, x)| identities::gf3_equivalence(l, *z, *x, sign));
                let shift_points: Vec<(usize, f64)> =
                    (0..=10).flat_map(|n| self.xs.iter().map(move |x| (n, *x))).collect();
                let shift = par_max(&shift_points, |(n, x)| identities::jacobi_shift_check(l, *n, *x, sign));
                vec![
                    CheckResult::new("gf3_equivalence", TOL_GF3, gf3),
                    CheckResult::new("jacobi_shift", TOL_JACOBI_SHIFT, shift),
                ]
            }
            Family::FreeMeixner => {
                let outcome = riccati::free_meixner_uniqueness(self.params.a, self.params.b, 15)
                    .map(|s| (s.c.len(), s.max_abs_coefficient()));
                vec![CheckResult::new("free_meixner_uniqueness", TOL_UNIQUENESS, outcome)]
            }
        }
    }
}

/// Runs the verification campaign; the report is complete even when
/// checks fail.
pub fn verify_report(params: FamilyParams, zmax: f64, grid: usize, tol: f64) -> Result<VerificationReport, CliError> {
    let start = Instant::now();
    if grid < 4 {
        return Err(CliError::invalid(format!("--grid must be >= 4, got {grid}")));
    }
    if !(tol > 0.0) {
        return Err(CliError::invalid(format!("--tol must be positive, got {tol}")));
    }
    let measure = measures::measure_from_params(params)?;
    let cf = genfun::closed_form_from_params(params)?;
    if !(zmax > 0.0 && zmax < cf.domain_radius) {
        return Err(CliError::invalid(format!(
            "--zmax must lie in (0, {}) for {}, got {zmax}",
            cf.domain_radius, params.family
        )));
    }
    let campaign = Campaign {
        params,
        measure: &measure,
        cf: &cf,
        zs: z_grid(zmax, grid),
        xs: measure.support.grid(11),
        reals: real_grid(zmax),
        tol,
    };
    let checks = with_pool(|| {
        let mut checks = vec![
            campaign.series(),
            campaign.moments(),
            campaign.riccati_f(),
            campaign.riccati_u(),
            campaign.moment_ode(),
            campaign.classification(),
            campaign.h_initial(),
        ];
        checks.extend(campaign.orthogonality());
        checks.extend(campaign.identities());
        checks
    })?;
    let free = params.family == Family::FreeMeixner;
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        family: params.family.name().to_string(),
        lambda: params.lambda,
        a: free.then_some(params.a),
        b: free.then_some(params.b),
        zmax,
        grid,
        passed: checks.iter().all(|c| c.passed),
        checks,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let params = family_params(&args.family)?;
    let report = verify_report(params, args.zmax, args.grid, args.tol)?;
    for c in &report.checks {
        eprintln!(
            "{:<32} {:>5} points  max {:<12.3e} tol {:<8.1e} {}",
            c.name,
            c.points_tested,
            c.max_residual,
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        );
        if let Some(err) = &c.error {
            eprintln!("    {err}");
        }
    }
    emit(args.out.as_deref(), &report.to_json())?;
    Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub branch_label: String,
    pub family: Option<String>,
    pub symmetric: bool,
    #[serde(serialize_with = "num")]
    pub omega2: f64,
    #[serde(serialize_with = "num")]
    pub alpha1: f64,
    #[serde(serialize_with = "nums")]
    pub e_coeffs: Vec<f64>,
    #[serde(serialize_with = "num")]
    pub max_residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub schema: u32,
    pub tool_version: String,
    #[serde(serialize_with = "num")]
    pub lambda: f64,
    pub branches: Vec<BranchReport>,
    pub notes: Vec<String>,
}

impl From<&riccati::ClassificationSolution> for BranchReport {
    fn from(s: &riccati::ClassificationSolution) -> Self {
        BranchReport {
            branch_label: s.branch_label.clone(),
            family: s.family.map(|f| f.name().to_string()),
            symmetric: s.symmetric,
            omega2: s.omega2,
            alpha1: s.alpha1,
            e_coeffs: s.e_coeffs.to_vec(),
            max_residual: s.max_residual,
            valid: s.valid,
        }
    }
}

pub const DEGENERATE_NOTE: &str =
    "degenerate case: free Meixner family (lambda = 1; alpha_n = a, omega_n = 1 + b for n >= 2, b >= -1)";

pub fn classify_report(lambda: f64) -> Result<ClassificationReport, CliError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(CliError::invalid(format!("lambda must be > 0, got {lambda}")));
    }
    let mut branches = Vec::new();
    let mut notes = Vec::new();
    if (lambda - 1.0).abs() < measures::LAMBDA_ONE_BAND {
        notes.push(DEGENERATE_NOTE.to_string());
    } else {
        match riccati::solve_symmetric(lambda) {
            Ok(sols) => branches.extend(sols.iter().map(BranchReport::from)),
            Err(e) => notes.push(format!("symmetric system not solved: {e}")),
        }
        if lambda > 0.5 {
            match riccati::solve_nonsymmetric(lambda) {
                Ok(out) => {
                    branches.extend(out.solutions.iter().map(BranchReport::from));
                    notes.push(format!("rejected root omega_2 = {} of the z^4 equation", out.rejected_omega2));
                }
                Err(e) => notes.push(format!("non-symmetric system not solved: {e}")),
            }
        } else {
            notes.push("no non-symmetric solution for lambda <= 1/2".to_string());
        }
    }
    Ok(ClassificationReport {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        lambda,
        branches,
        notes,
    })
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<i32, CliError> {
    let report = classify_report(args.lambda)?;
    let mut text = String::new();
    for b in &report.branches {
        text.push_str(&format!(
            "{:<40} family {:<13} omega2 {:<22} alpha1 {:<23} E [{}, {}, {}] residual {:.2e} {}\n",
            b.branch_label,
            b.family.as_deref().unwrap_or("-"),
            sig17(b.omega2),
            sig17(b.alpha1),
            sig17(b.e_coeffs[0]),
            sig17(b.e_coeffs[1]),
            sig17(b.e_coeffs[2]),
            b.max_residual,
            if b.valid { "valid" } else { "invalid" }
        ));
    }
    for n in &report.notes {
        text.push_str(n);
        text.push('\n');
    }
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    match &args.out {
        Some(path) => {
            print!("{text}");
            write_atomic(path, json.as_bytes())?;
        }
        None => {
            eprint!("{text}");
            print!("{json}");
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_quadrature(args: &QuadratureArgs) -> Result<i32, CliError> {
    let params = family_params(&args.family)?;
    let measure = measures::measure_from_params(params)?;
    let rule = measures::gauss_quadrature(&measure, args.order)?;
    let mut comment = format!("family={} lambda={} order={}", params.family, sig17(params.lambda), args.order);
    if params.family == Family::FreeMeixner {
        comment.push_str(&format!(" a={} b={}", sig17(params.a), sig17(params.b)));
    }
    emit(args.out.as_deref(), &rule.to_csv(&comment))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_avoids_negative_axis() {
        let pts = z_grid(0.1, 4);
        assert_eq!(pts.len(), 14);
        assert!(pts.iter().all(|z| !(z.im == 0.0 && z.re < 0.0)));
    }

    #[test]
    fn numbers_have_17_digits_and_nan_is_null() {
        let c = CheckResult {
            name: "x".into(),
            points_tested: 1,
            max_residual: f64::NAN,
            tolerance: 0.1,
            passed: false,
            error: None,
        };
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"max_residual\":null"), "{s}");
        assert!(s.contains("\"tolerance\":1.0000000000000001e-1"), "{s}");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["tolerance"].as_f64(), Some(0.1));
    }

    #[test]
    fn classification_notes() {
        let r = classify_report(1.0).unwrap();
        assert!(r.branches.is_empty());
        assert!(r.notes[0].starts_with("degenerate case: free Meixner family"));
        let r = classify_report(0.4).unwrap();
        let valid: Vec<_> = r.branches.iter().filter(|b| b.valid).collect();
        assert_eq!(valid.len(), 1);
        assert_eq!(valid[0].family.as_deref(), Some("sym1"));
        let r = classify_report(2.0).unwrap();
        assert_eq!(r.branches.iter().filter(|b| b.valid).count(), 4);
        assert!(classify_report(-1.0).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::Parameter("x".into())).code, EXIT_INVALID);
        assert_eq!(CliError::from(Error::EigenSolver("x".into())).code, EXIT_CHECK_FAILED);
    }
}
