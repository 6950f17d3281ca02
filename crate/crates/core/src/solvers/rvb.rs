//! Solver for right-hand sides with least-squares structure, `v = S^H f`:
//! `x = S^H (S S^H + lambda I)^-1 f`.

use std::time::Instant;

use crate::error::{invalid, Result};
use crate::kernels;
use crate::ops::{apply_parts, residual_from_product};
use crate::scalar::Scalar;
use crate::solvers::CholWorkspace;
use crate::system::{check_lambda, Method, ScoreMatrix, Solution, Variant};
use crate::workspace::MemoryMeter;

/// Solves `(S^H S + lambda I) x = S^H f` given the length-`n` vector `f`.
///
/// Shares the Gram factorization with the Cholesky method. The residual is
/// reported against `v = S^H f`.
pub fn solve_rvb<T: Scalar>(s: &ScoreMatrix<T>, lambda: f64, f: &[T]) -> Result<Solution<T>> {
    check_lambda(lambda)?;
    if f.len() != s.n() {
        return invalid(format!("f has length {}, expected n = {}", f.len(), s.n()));
    }
    let started = Instant::now();
    let mut meter = MemoryMeter::new();
    meter.record(s.n() * s.n());
    let mut ws = CholWorkspace::factor(s, lambda)?;
    meter.record(2 * s.n());
    let y = ws.solve(f);
    let x = kernels::adjoint_matvec(s.as_mat(), &y);
    meter.record(x.len());
    let wall_seconds = started.elapsed().as_secs_f64();

    let v = kernels::adjoint_matvec(s.as_mat(), f);
    let ax = apply_parts(s, lambda, &x, Variant::Hermitian)?;
    let r = residual_from_product(&ax, &v);
    Ok(Solution {
        x,
        method: Method::Rvb,
        abs_residual: r.abs,
        rel_residual: r.rel,
        wall_seconds,
        iterations: None,
        converged: true,
        workspace: meter.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::solve_chol;
    use crate::system::DampedSystem;

    #[test]
    fn one_by_two_example() {
        let s = ScoreMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let x = solve_rvb(&s, 1.0, &[1.0]).unwrap().x;
        assert!((x[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 6.0).abs() < 1e-15);

        let sys = DampedSystem::new(s, 1.0, vec![1.0, 2.0]).unwrap();
        let xc = solve_chol(&sys).unwrap().x;
        for (a, b) in x.iter().zip(&xc) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let s = ScoreMatrix::from_rows(&[[1.0, 2.0, 3.0], [0.5, -1.0, 2.0]]).unwrap();
        let sol = solve_rvb(&s, 0.3, &[0.0, 0.0]).unwrap();
        assert_eq!(sol.x, vec![0.0; 3]);
        assert_eq!(sol.abs_residual, 0.0);
    }

    #[test]
    fn rejects_wrong_length() {
        let s = ScoreMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(solve_rvb(&s, 1.0, &[1.0, 2.0]).is_err());
    }
}
