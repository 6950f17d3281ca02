use std::borrow::Cow;
use std::fmt;
use std::hint::black_box;

use fisher_core::{
    realpart_system, residual_realpart, solve, solve_naive_realpart_capped, solvers, Complex64,
    DampedSystem, FisherError, Method, Result, Scalar, Solution, SolveOptions, Variant,
};

use crate::problem::{AnyProblem, Problem};

/// Records whose verified relative residual exceeds this are marked failed.
pub const RESIDUAL_GATE: f64 = 1e-6;

pub const DEFAULT_WARMUP: usize = 2;
pub const DEFAULT_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    /// An iterative method stopped at its iteration cap.
    NotConverged,
    /// The dense oracle declined the size.
    Refused,
    /// The solver errored, or the residual check failed.
    Failed(String),
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        *self == RunStatus::Ok
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Ok => f.write_str("ok"),
            RunStatus::NotConverged => f.write_str("not-converged"),
            RunStatus::Refused => f.write_str("refused"),
            RunStatus::Failed(_) => f.write_str("failed"),
        }
    }
}

/// One timed benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub seed: u64,
    pub repeats: usize,
    pub median_seconds: f64,
    pub min_seconds: f64,
    pub rel_residual: f64,
    /// Rows of the matrix the solver actually saw (`2n` for the real-part variant).
    pub effective_n: usize,
    pub status: RunStatus,
}

/// Times `repeats` solves after `warmup` untimed ones.
///
/// Each solve reports its own wall time from a monotonic clock, excluding
/// the residual check. The residual recorded is that of the last solve.
/// Solver failures become a record status; argument problems (wrong
/// variant for the scalar kind, `rvb` without a structured right-hand side)
/// are errors.
pub fn time_method(
    problem: &AnyProblem,
    method: Method,
    variant: Variant,
    warmup: usize,
    repeats: usize,
    opts: &SolveOptions,
) -> Result<BenchRecord> {
    if repeats == 0 {
        return Err(FisherError::InvalidArgument("repeats must be >= 1".into()));
    }
    let runner = Runner::new(problem, method, variant)?;
    let mut record = BenchRecord {
        method,
        n: problem.n(),
        m: problem.m(),
        lambda: problem.lambda(),
        seed: problem.seed(),
        repeats,
        median_seconds: f64::NAN,
        min_seconds: f64::NAN,
        rel_residual: f64::NAN,
        effective_n: runner.effective_n(),
        status: RunStatus::Ok,
    };

    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for k in 0..warmup + repeats {
        match runner.run(opts) {
            Ok(outcome) => {
                if k >= warmup {
                    times.push(outcome.wall_seconds);
                }
                last = Some(black_box(outcome));
            }
            Err(FisherError::OracleCapExceeded { .. }) => {
                record.status = RunStatus::Refused;
                return Ok(record);
            }
            Err(e) => {
                record.status = RunStatus::Failed(e.to_string());
                return Ok(record);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    record.min_seconds = times[0];
    record.median_seconds = median(&times);
    let last = last.expect("at least one run");
    record.rel_residual = last.rel_residual;
    record.status = if !last.converged {
        RunStatus::NotConverged
    } else if !(last.rel_residual <= RESIDUAL_GATE) {
        RunStatus::Failed(format!("relative residual {:e} above {RESIDUAL_GATE:e}", last.rel_residual))
    } else {
        RunStatus::Ok
    };
    Ok(record)
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// What the harness keeps from a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub wall_seconds: f64,
    pub rel_residual: f64,
    pub converged: bool,
}

impl<T> From<&Solution<T>> for Outcome {
    fn from(s: &Solution<T>) -> Self {
        Self { wall_seconds: s.wall_seconds, rel_residual: s.rel_residual, converged: s.converged }
    }
}

/// A validated (problem, method, variant) combination.
enum Runner<'a> {
    Real(&'a Problem<f64>, Method),
    Hermitian(&'a Problem<Complex64>, Method),
    RealPart(Cow<'a, DampedSystem<Complex64>>, Method),
}

impl<'a> Runner<'a> {
    fn new(problem: &'a AnyProblem, method: Method, variant: Variant) -> Result<Self> {
        let runner = match (problem, variant) {
            (AnyProblem::Real(p), Variant::Plain) => Runner::Real(p, method),
            (AnyProblem::Complex(p), Variant::Hermitian) => Runner::Hermitian(p, method),
            (AnyProblem::Complex(p), Variant::RealPart) => {
                // Generated complex problems carry a complex v; this variant
                // takes its real part.
                let system = if p.system.rhs().iter().any(|z| z.im != 0.0) {
                    Cow::Owned(with_real_rhs(&p.system)?)
                } else {
                    Cow::Borrowed(&p.system)
                };
                Runner::RealPart(system, method)
            }
            (AnyProblem::Real(_), v) => {
                return Err(FisherError::InvalidArgument(format!(
                    "variant {v} needs complex scores; real problems use plain"
                )))
            }
            (AnyProblem::Complex(_), Variant::Plain) => {
                return Err(FisherError::InvalidArgument(
                    "complex problems use the hermitian or realpart variant".into(),
                ))
            }
        };
        let has_f = match &runner {
            Runner::Real(p, _) => p.f.is_some(),
            Runner::Hermitian(p, _) => p.f.is_some(),
            Runner::RealPart(..) => false,
        };
        if method == Method::Rvb && !has_f {
            return Err(FisherError::InvalidArgument(
                "rvb needs a structured problem (v = S^H f)".into(),
            ));
        }
        Ok(runner)
    }

    fn effective_n(&self) -> usize {
        match self {
            Runner::Real(p, _) => p.system.n(),
            Runner::Hermitian(p, _) => p.system.n(),
            Runner::RealPart(system, _) => 2 * system.n(),
        }
    }

    fn run(&self, opts: &SolveOptions) -> Result<Outcome> {
        match self {
            Runner::Real(p, method) => run_typed(p, *method, opts),
            Runner::Hermitian(p, method) => run_typed(p, *method, opts),
            Runner::RealPart(system, method) => {
                let sol = solve_realpart_with(system, *method, opts)?;
                Ok(Outcome::from(&sol))
            }
        }
    }
}

fn run_typed<T: Scalar>(p: &Problem<T>, method: Method, opts: &SolveOptions) -> Result<Outcome> {
    let sol = solve(method, &p.system, p.f.as_deref(), opts)?;
    Ok(Outcome::from(&sol))
}

/// Real-part variant with any method: the stacked real system for every
/// method except the dense oracle, which forms `Re[S^H S]` directly.
/// The right-hand side must be real.
pub fn solve_realpart_with(
    system: &DampedSystem<Complex64>,
    method: Method,
    opts: &SolveOptions,
) -> Result<Solution<f64>> {
    let started = std::time::Instant::now();
    let mut sol = match method {
        Method::Naive => solve_naive_realpart_capped(system, opts.naive_cap)?,
        Method::Rvb => {
            return Err(FisherError::InvalidArgument(
                "rvb is not defined for the real-part variant".into(),
            ))
        }
        _ => {
            let stacked = realpart_system(system)?;
            let mut sol = solvers::solve(method, &stacked, None, opts)?;
            let r = residual_realpart(system, &sol.x)?;
            sol.abs_residual = r.abs;
            sol.rel_residual = r.rel;
            sol
        }
    };
    sol.wall_seconds = started.elapsed().as_secs_f64();
    Ok(sol)
}

/// Copy of `system` with the imaginary part of `v` dropped.
pub fn with_real_rhs(system: &DampedSystem<Complex64>) -> Result<DampedSystem<Complex64>> {
    let (s, lambda, v) = system.clone().into_parts();
    DampedSystem::new(s, lambda, v.iter().map(|z| Complex64::new(z.re, 0.0)).collect())
}
