//! Cross-checks every method against the dense oracle on one small problem.

use std::fmt;

use fisher_core::{
    norm2, solve, solve_naive_realpart_capped, CgOptions, Complex64, Method, Result,
    Scalar, SolveOptions, Variant,
};

use crate::problem::{generate_typed, ProblemKind};
use crate::timing::{solve_realpart_with, with_real_rhs};

/// Largest relative L2 distance from the oracle that still passes.
pub const CHECK_TOL: f64 = 1e-7;

/// CG tolerance used when the caller does not choose one.
pub const CHECK_CG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub variant: Variant,
    pub method: Method,
    pub rel_error: f64,
    pub rel_residual: f64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.rel_error <= CHECK_TOL
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<9} {:<5} rel_error={:.3e} rel_residual={:.3e}",
            if self.passed() { "ok" } else { "FAIL" },
            self.variant,
            self.method,
            self.rel_error,
            self.rel_residual
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub lambda: f64,
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(CheckLine::passed)
    }
}

/// `||x - reference|| / ||reference||`, or the plain distance when the
/// reference is zero.
pub fn rel_error<T: Scalar>(x: &[T], reference: &[T]) -> f64 {
    let diff: Vec<T> = x.iter().zip(reference).map(|(a, b)| *a - *b).collect();
    let scale = norm2(reference);
    let d = norm2(&diff);
    if scale > 0.0 { d / scale } else { d }
}

/// Solves a structured real problem and a complex problem of shape `n x m`
/// with every method and compares each against the dense solve.
///
/// Uses `seed` for the real problem and `seed + 1` for the complex one.
pub fn run_check(n: usize, m: usize, seed: u64, lambda: f64, opts: &SolveOptions) -> Result<CheckReport> {
    let mut lines = Vec::new();

    let real = generate_typed::<f64>(seed, n, m, lambda, ProblemKind::Structured)?;
    let oracle = solve(Method::Naive, &real.system, None, opts)?;
    for method in [Method::Chol, Method::SvdEigh, Method::SvdDirect, Method::Cg, Method::Rvb] {
        let sol = solve(method, &real.system, real.f.as_deref(), opts)?;
        lines.push(CheckLine {
            variant: Variant::Plain,
            method,
            rel_error: rel_error(&sol.x, &oracle.x),
            rel_residual: sol.rel_residual,
        });
    }

    let cplx = generate_typed::<Complex64>(seed.wrapping_add(1), n, m, lambda, ProblemKind::ComplexGaussian)?;
    let oracle = solve(Method::Naive, &cplx.system, None, opts)?;
    let compared = [Method::Chol, Method::SvdEigh, Method::SvdDirect, Method::Cg];
    for method in compared {
        let sol = solve(method, &cplx.system, None, opts)?;
        lines.push(CheckLine {
            variant: Variant::Hermitian,
            method,
            rel_error: rel_error(&sol.x, &oracle.x),
            rel_residual: sol.rel_residual,
        });
    }

    let projected = with_real_rhs(&cplx.system)?;
    let oracle = solve_naive_realpart_capped(&projected, opts.naive_cap)?;
    for method in compared {
        let sol = solve_realpart_with(&projected, method, opts)?;
        lines.push(CheckLine {
            variant: Variant::RealPart,
            method,
            rel_error: rel_error(&sol.x, &oracle.x),
            rel_residual: sol.rel_residual,
        });
    }

    Ok(CheckReport { n, m, seed, lambda, lines })
}

/// Default options for [`run_check`]: a tight CG tolerance so the iterative
/// method can meet [`CHECK_TOL`].
pub fn check_options() -> SolveOptions {
    SolveOptions {
        cg: CgOptions { tol: CHECK_CG_TOL, ..CgOptions::default() },
        ..SolveOptions::default()
    }
}
