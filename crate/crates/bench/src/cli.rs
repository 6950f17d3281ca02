//! The `fisher-solve` command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fisher_core::{
    solve, CgOptions, Complex64, DampedSystem, FisherError, Mat, Method, ScoreMatrix, Solution,
    SolveOptions, Variant,
};

use crate::check::{check_options, run_check};
use crate::csv::{format_record, HEADER};
use crate::fmat::{self, FmatError, FmatMatrix};
use crate::problem::{generate_problem, AnyProblem, ProblemKind};
use crate::scaling::{fit_scaling, Axis};
use crate::timing::{
    solve_realpart_with, time_method, RunStatus, DEFAULT_REPEATS, DEFAULT_WARMUP, RESIDUAL_GATE,
};

/// Environment variable read by [`configure_threads`].
pub const THREADS_ENV: &str = "FISHER_SOLVE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fisher-solve",
    version,
    about = "Solve and benchmark damped Fisher systems (S^T S + lambda I) x = v"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read S and v from FMAT files, solve, and write x as FMAT.
    Solve(SolveArgs),
    /// Time one or more methods on a generated problem and print CSV.
    Bench(BenchArgs),
    /// Time one method over a geometric size sweep and fit the exponent.
    Scaling(ScalingArgs),
    /// Compare every method against the dense oracle on a small problem.
    Check(CheckArgs),
    /// Write a generated problem to a directory as FMAT files.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// CG relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// CG iteration cap.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

impl SolverFlags {
    fn options(&self, base: SolveOptions) -> Result<SolveOptions, CliError> {
        let mut opts = base;
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            opts.cg.tol = tol;
        }
        if let Some(max_iter) = self.max_iter {
            opts.cg = CgOptions { max_iter, ..opts.cg };
        }
        Ok(opts)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// FMAT file holding the n x m score matrix.
    #[arg(long = "s")]
    s: PathBuf,
    /// FMAT file holding v (length m).
    #[arg(long = "v")]
    v: PathBuf,
    /// FMAT file holding f (length n), required by rvb.
    #[arg(long = "f")]
    f: Option<PathBuf>,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value = "chol")]
    method: Method,
    /// Defaults to plain for real S and hermitian for complex S.
    #[arg(long)]
    variant: Option<Variant>,
    /// Destination FMAT file for x.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct ProblemFlags {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "real")]
    kind: ProblemKind,
}

#[derive(Debug, Args)]
struct TimingFlags {
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = DEFAULT_WARMUP)]
    warmup: usize,
    /// Defaults to plain for real kinds and hermitian for complex.
    #[arg(long)]
    variant: Option<Variant>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated list of methods.
    #[arg(long, value_delimiter = ',', default_value = "chol")]
    method: Vec<Method>,
    #[command(flatten)]
    problem: ProblemFlags,
    #[command(flatten)]
    timing: TimingFlags,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    #[arg(long, default_value = "chol")]
    method: Method,
    /// The dimension held constant, e.g. `n=2048`.
    #[arg(long)]
    fix: FixSpec,
    /// The swept dimension as `dim=first:last:count`, e.g. `m=10000:200000:5`.
    #[arg(long)]
    vary: VarySpec,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "real")]
    kind: ProblemKind,
    #[command(flatten)]
    timing: TimingFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    problem: ProblemFlags,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    N,
    M,
}

fn parse_dim(s: &str) -> Result<(Dim, &str), String> {
    let (dim, rest) = s.split_once('=').ok_or_else(|| format!("expected dim=..., got {s:?}"))?;
    let dim = match dim.trim() {
        "n" => Dim::N,
        "m" => Dim::M,
        other => return Err(format!("unknown dimension {other:?}; use n or m")),
    };
    Ok((dim, rest))
}

fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    // Accept integral scientific notation such as 1e5.
    s.parse::<usize>().or_else(|_| match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x < 2f64.powi(53) => Ok(x as usize),
        _ => Err(format!("invalid size {s:?}")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FixSpec {
    dim: Dim,
    size: usize,
}

impl FromStr for FixSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (dim, rest) = parse_dim(s)?;
        Ok(FixSpec { dim, size: parse_size(rest)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VarySpec {
    dim: Dim,
    first: usize,
    last: usize,
    count: usize,
}

impl FromStr for VarySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (dim, rest) = parse_dim(s)?;
        let parts: Vec<&str> = rest.split(':').collect();
        let [first, last, count] = parts[..] else {
            return Err(format!("expected first:last:count, got {rest:?}"));
        };
        Ok(VarySpec {
            dim,
            first: parse_size(first)?,
            last: parse_size(last)?,
            count: count.trim().parse().map_err(|_| format!("invalid count {count:?}"))?,
        })
    }
}

/// `count` sizes from `first` to `last`, evenly spaced in log scale and
/// rounded to integers. Duplicates after rounding are dropped.
pub fn geometric_sizes(first: usize, last: usize, count: usize) -> Result<Vec<usize>, String> {
    if first == 0 || last < first {
        return Err(format!("need 1 <= first <= last, got {first}:{last}"));
    }
    if count < 2 {
        return Err(format!("need at least 2 sizes, got {count}"));
    }
    let (lo, hi) = (first as f64, last as f64);
    let mut sizes: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (lo * (hi / lo).powf(t)).round() as usize
        })
        .collect();
    sizes[0] = first;
    sizes[count - 1] = last;
    sizes.dedup();
    Ok(sizes)
}

#[derive(Debug)]
enum CliError {
    /// Bad or inconsistent flags; exit code 2.
    Usage(String),
    /// The run itself failed; exit code 1.
    Failure(String),
}

impl From<FmatError> for CliError {
    fn from(e: FmatError) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<FisherError> for CliError {
    fn from(e: FisherError) -> Self {
        CliError::Failure(e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Returns the process exit code: 0 on success, 1 when a solve or check
/// fails, 2 for bad arguments.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Scaling(a) => cmd_scaling(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

/// Applies [`THREADS_ENV`] to the global thread pool. Unset or `0` keeps the
/// default of one thread per core.
pub fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn default_variant(kind: ProblemKind) -> Variant {
    match kind {
        ProblemKind::ComplexGaussian => Variant::Hermitian,
        ProblemKind::RealGaussian | ProblemKind::Structured => Variant::Plain,
    }
}

fn check_lambda_flag(lambda: f64) -> Result<(), CliError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--lambda must be positive and finite, got {lambda}")))
    }
}

fn make_problem(
    seed: u64,
    n: usize,
    m: usize,
    lambda: f64,
    kind: ProblemKind,
) -> Result<AnyProblem, CliError> {
    check_lambda_flag(lambda)?;
    generate_problem(seed, n, m, lambda, kind).map_err(|e| CliError::Usage(e.to_string()))
}

fn open_sink<'a>(path: Option<&Path>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(out),
    })
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = a.solver.options(SolveOptions::default())?;
    let p = &a.problem;
    let problem = make_problem(p.seed, p.n, p.m, p.lambda, p.kind)?;
    let variant = a.timing.variant.unwrap_or(default_variant(p.kind));
    let mut sink = open_sink(a.out.as_deref(), out)?;
    writeln!(sink, "{HEADER}")?;
    let mut failed = Vec::new();
    for method in a.method {
        let record = time_method(&problem, method, variant, a.timing.warmup, a.timing.repeats, &opts)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(sink, "{}", format_record(&record))?;
        if let RunStatus::Failed(why) = &record.status {
            failed.push(format!("{method}: {why}"));
        }
    }
    sink.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(failed.join("; ")))
    }
}

fn cmd_scaling(a: ScalingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.fix.dim == a.vary.dim {
        return Err(CliError::Usage("--fix and --vary must name different dimensions".into()));
    }
    let opts = a.solver.options(SolveOptions::default())?;
    let sizes = geometric_sizes(a.vary.first, a.vary.last, a.vary.count).map_err(CliError::Usage)?;
    let variant = a.timing.variant.unwrap_or(default_variant(a.kind));
    let axis = match a.vary.dim {
        Dim::N => Axis::VaryN,
        Dim::M => Axis::VaryM,
    };
    let mut sink = open_sink(a.out.as_deref(), out)?;
    writeln!(sink, "{HEADER}")?;
    let mut records = Vec::with_capacity(sizes.len());
    for size in sizes {
        let (n, m) = match axis {
            Axis::VaryN => (size, a.fix.size),
            Axis::VaryM => (a.fix.size, size),
        };
        let problem = make_problem(a.seed, n, m, a.lambda, a.kind)?;
        let record = time_method(&problem, a.method, variant, a.timing.warmup, a.timing.repeats, &opts)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(sink, "{}", format_record(&record))?;
        records.push(record);
    }
    let fit = fit_scaling(&records, axis)?;
    let fixed = match axis {
        Axis::VaryN => "m",
        Axis::VaryM => "n",
    };
    writeln!(
        sink,
        "# fit method={} axis={} {fixed}={} exponent={:.4} r_squared={:.4}",
        a.method, fit.axis, a.fix.size, fit.exponent, fit.r_squared
    )?;
    sink.flush()?;
    Ok(())
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_lambda_flag(a.lambda)?;
    let opts = a.solver.options(check_options())?;
    let report = run_check(a.n, a.m, a.seed, a.lambda, &opts)?;
    writeln!(out, "# check n={} m={} seed={} lambda={}", a.n, a.m, a.seed, a.lambda)?;
    for line in &report.lines {
        writeln!(out, "{line}")?;
    }
    if report.passed() {
        writeln!(out, "# all {} comparisons passed", report.lines.len())?;
        Ok(())
    } else {
        let bad = report.lines.iter().filter(|l| !l.passed()).count();
        Err(CliError::Failure(format!("{bad} of {} comparisons failed", report.lines.len())))
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &a.problem;
    let problem = make_problem(p.seed, p.n, p.m, p.lambda, p.kind)?;
    fs::create_dir_all(&a.out)?;
    let mut files: Vec<(&str, FmatMatrix)> = Vec::new();
    match problem {
        AnyProblem::Real(pr) => {
            let f = pr.f.clone();
            let (s, _, v) = pr.system.into_parts();
            files.push(("S.fmat", FmatMatrix::Real(s.into_mat())));
            files.push(("v.fmat", FmatMatrix::real_vector(&v)));
            if let Some(f) = f {
                files.push(("f.fmat", FmatMatrix::real_vector(&f)));
            }
        }
        AnyProblem::Complex(pr) => {
            let (s, _, v) = pr.system.into_parts();
            files.push(("S.fmat", FmatMatrix::Complex(s.into_mat())));
            files.push(("v.fmat", FmatMatrix::complex_vector(&v)));
        }
    }
    for (name, mat) in &files {
        let path = a.out.join(name);
        fmat::save(&path, mat)?;
        writeln!(out, "wrote {} ({}x{})", path.display(), mat.rows(), mat.cols())?;
    }
    writeln!(out, "# lambda={}", p.lambda)?;
    Ok(())
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_lambda_flag(a.lambda)?;
    let opts = a.solver.options(SolveOptions::default())?;
    if a.method == Method::Rvb && a.f.is_none() {
        return Err(CliError::Usage("rvb needs --f".into()));
    }
    let s = fmat::load(&a.s)?;
    let v = fmat::load(&a.v)?;
    let f = a.f.as_deref().map(fmat::load).transpose()?;

    let (x, report) = match s {
        FmatMatrix::Real(s) => {
            let variant = a.variant.unwrap_or(Variant::Plain);
            if variant != Variant::Plain {
                return Err(CliError::Usage(format!("variant {variant} needs complex S")));
            }
            let system = DampedSystem::new(ScoreMatrix::new(s)?, a.lambda, v.into_real_vector()?)?;
            let f = f.map(FmatMatrix::into_real_vector).transpose()?;
            let sol = solve(a.method, &system, f.as_deref(), &opts)?;
            (FmatMatrix::real_vector(&sol.x), summary(&sol, variant, system.n(), system.m()))
        }
        FmatMatrix::Complex(s) => {
            let variant = a.variant.unwrap_or(Variant::Hermitian);
            let system = complex_system(s, a.lambda, v)?;
            match variant {
                Variant::Hermitian => {
                    let f = f.map(FmatMatrix::into_complex_vector).transpose()?;
                    let sol = solve(a.method, &system, f.as_deref(), &opts)?;
                    (FmatMatrix::complex_vector(&sol.x), summary(&sol, variant, system.n(), system.m()))
                }
                Variant::RealPart => {
                    if a.method == Method::Rvb {
                        return Err(CliError::Usage("rvb is not defined for realpart".into()));
                    }
                    let sol = solve_realpart_with(&system, a.method, &opts)?;
                    (FmatMatrix::real_vector(&sol.x), summary(&sol, variant, system.n(), system.m()))
                }
                Variant::Plain => {
                    return Err(CliError::Usage(
                        "complex S uses the hermitian or realpart variant".into(),
                    ))
                }
            }
        }
    };
    fmat::save(&a.out, &x)?;
    writeln!(out, "{}", report.line)?;
    if !report.converged {
        return Err(CliError::Failure(format!("{} did not converge", a.method)));
    }
    if !(report.rel_residual <= RESIDUAL_GATE) {
        return Err(CliError::Failure(format!(
            "relative residual {:e} above {RESIDUAL_GATE:e}",
            report.rel_residual
        )));
    }
    Ok(())
}

fn complex_system(s: Mat<Complex64>, lambda: f64, v: FmatMatrix) -> Result<DampedSystem<Complex64>, CliError> {
    Ok(DampedSystem::new(ScoreMatrix::new(s)?, lambda, v.into_complex_vector()?)?)
}

struct Summary {
    line: String,
    converged: bool,
    rel_residual: f64,
}

fn summary<T>(sol: &Solution<T>, variant: Variant, n: usize, m: usize) -> Summary {
    let mut line = format!(
        "method={} variant={variant} n={n} m={m} rel_residual={:.3e} seconds={:.6e}",
        sol.method, sol.rel_residual, sol.wall_seconds
    );
    if let Some(it) = sol.iterations {
        line.push_str(&format!(" iterations={it}"));
    }
    Summary { line, converged: sol.converged, rel_residual: sol.rel_residual }
}
