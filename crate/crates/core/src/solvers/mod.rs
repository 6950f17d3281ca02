//! Solution methods for the damped Fisher system.
//!
//! All methods are generic over the scalar kind. For complex scores they
//! solve the Hermitian system `(S^H S + lambda I) x = v`; the real-part
//! system is reached by stacking real and imaginary parts first (see
//! [`crate::sr::realpart_system`]).

mod cg;
mod chol;
mod naive;
mod rvb;
mod svd;

use std::time::Instant;

pub use cg::{solve_cg, CgOptions};
pub use chol::{solve_chol, solve_chol_hermitian, solve_realpart, CholWorkspace};
pub use naive::{
    solve_naive, solve_naive_capped, solve_naive_realpart, solve_naive_realpart_capped,
    DEFAULT_NAIVE_CAP,
};
pub use rvb::solve_rvb;
pub use svd::{
    solve_svd_direct, solve_svd_eigh, solve_svd_from_factors, thin_svd_direct, thin_svd_eigh,
    ThinSvd, DEFAULT_SIGMA_FLOOR,
};

use crate::error::{invalid, Result};
use crate::ops::residual;
use crate::scalar::Scalar;
use crate::system::{DampedSystem, Method, Solution, Variant};
use crate::workspace::WorkspaceStats;

/// Knobs for [`solve`]; each method reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub cg: CgOptions,
    pub naive_cap: usize,
    pub sigma_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            cg: CgOptions::default(),
            naive_cap: DEFAULT_NAIVE_CAP,
            sigma_floor: DEFAULT_SIGMA_FLOOR,
        }
    }
}

/// Runs `method` on `system`.
///
/// `Rvb` needs the coefficient vector `f` with `v = S^H f`; the other methods
/// ignore it.
pub fn solve<T: Scalar>(
    method: Method,
    system: &DampedSystem<T>,
    f: Option<&[T]>,
    opts: &SolveOptions,
) -> Result<Solution<T>> {
    match method {
        Method::Chol => chol::solve_generic(system),
        Method::SvdEigh => solve_svd_eigh(system, opts.sigma_floor),
        Method::SvdDirect => solve_svd_direct(system),
        Method::Naive => solve_naive_capped(system, opts.naive_cap),
        Method::Cg => solve_cg(system, opts.cg),
        Method::Rvb => match f {
            Some(f) => solve_rvb(system.scores(), system.lambda(), f),
            None => invalid("rvb needs a right-hand side of the form v = S^H f"),
        },
    }
}

/// Stamps timing and the recomputed residual onto a solution.
pub(crate) fn finish<T: Scalar>(
    system: &DampedSystem<T>,
    x: Vec<T>,
    method: Method,
    started: Instant,
    workspace: WorkspaceStats,
    iterations: Option<usize>,
    converged: bool,
) -> Result<Solution<T>> {
    let wall_seconds = started.elapsed().as_secs_f64();
    let r = residual(system, &x, Variant::Hermitian)?;
    Ok(Solution {
        x,
        method,
        abs_residual: r.abs,
        rel_residual: r.rel,
        wall_seconds,
        iterations,
        converged,
        workspace,
    })
}
