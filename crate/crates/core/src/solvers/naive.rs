//! Dense `m x m` reference solve. Cubic in `m`; test oracle only.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{FisherError, Result};
use crate::ops::residual_realpart;
use crate::scalar::Scalar;
use crate::solvers::finish;
use crate::system::{DampedSystem, Method, Solution};
use crate::workspace::WorkspaceStats;

/// Largest `m` the dense oracle will accept by default.
pub const DEFAULT_NAIVE_CAP: usize = 4096;

/// Forms `A = S^H S + lambda I` densely and solves `A x = v`.
pub fn solve_naive<T: Scalar>(system: &DampedSystem<T>) -> Result<Solution<T>> {
    solve_naive_capped(system, DEFAULT_NAIVE_CAP)
}

/// [`solve_naive`] with an explicit cap on `m`.
pub fn solve_naive_capped<T: Scalar>(system: &DampedSystem<T>, cap: usize) -> Result<Solution<T>> {
    let m = system.m();
    check_cap(m, cap)?;
    let started = Instant::now();
    let s = system.scores().as_mat().to_dmatrix();
    let mut a = s.adjoint() * &s;
    for k in 0..m {
        a[(k, k)] += T::from_real(system.lambda());
    }
    let x = dense_solve(a, DVector::from_column_slice(system.rhs()))?;
    finish(system, x, Method::Naive, started, dense_stats(m), None, true)
}

/// Forms `Re[S^H S] + lambda I` densely from the complex product and solves
/// it against `v`, which must be real.
pub fn solve_naive_realpart(system: &DampedSystem<Complex64>) -> Result<Solution<f64>> {
    solve_naive_realpart_capped(system, DEFAULT_NAIVE_CAP)
}

/// [`solve_naive_realpart`] with an explicit cap on `m`.
pub fn solve_naive_realpart_capped(
    system: &DampedSystem<Complex64>,
    cap: usize,
) -> Result<Solution<f64>> {
    let m = system.m();
    check_cap(m, cap)?;
    if system.rhs().iter().any(|z| z.im != 0.0) {
        return Err(FisherError::InvalidArgument(
            "real-part system needs a real right-hand side".into(),
        ));
    }
    let started = Instant::now();
    let s = system.scores().as_mat().to_dmatrix();
    let full = s.adjoint() * &s;
    let mut a = DMatrix::<f64>::from_fn(m, m, |i, j| full[(i, j)].re);
    for k in 0..m {
        a[(k, k)] += system.lambda();
    }
    let v = DVector::from_iterator(m, system.rhs().iter().map(|z| z.re));
    let x = dense_solve(a, v)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    let r = residual_realpart(system, &x)?;
    Ok(Solution {
        x,
        method: Method::Naive,
        abs_residual: r.abs,
        rel_residual: r.rel,
        wall_seconds,
        iterations: None,
        converged: true,
        workspace: dense_stats(m),
    })
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        Err(FisherError::OracleCapExceeded { m, cap })
    } else {
        Ok(())
    }
}

fn dense_stats(m: usize) -> WorkspaceStats {
    WorkspaceStats { peak_scalars: m * m + m, largest_buffer: m * m }
}

/// Cholesky, falling back to pivoted LU if round-off broke definiteness.
fn dense_solve<T: Scalar>(a: DMatrix<T>, v: DVector<T>) -> Result<Vec<T>> {
    let x = match Cholesky::new(a.clone()) {
        Some(ch) => ch.solve(&v),
        None => a
            .full_piv_lu()
            .solve(&v)
            .ok_or(FisherError::FactorizationFailed { pivot: 0 })?,
    };
    Ok(x.iter().copied().collect())
}
