//! Unpreconditioned conjugate gradient on `S^H S + lambda I`, matrix free.

use std::time::Instant;

use crate::error::{invalid, Result};
use crate::kernels::{self, dot};
use crate::scalar::{norm2, Scalar};
use crate::solvers::finish;
use crate::system::{DampedSystem, Method, Solution};
use crate::workspace::MemoryMeter;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Stop once `||r|| / ||v|| <= tol` (recursively updated residual).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

/// Conjugate gradient from `x0 = 0`.
///
/// Hitting `max_iter` is not an error: the iterate with the smallest
/// residual is returned with `converged = false`.
pub fn solve_cg<T: Scalar>(system: &DampedSystem<T>, opts: CgOptions) -> Result<Solution<T>> {
    if !(opts.tol > 0.0) {
        return invalid(format!("tol must be > 0, got {}", opts.tol));
    }
    if opts.max_iter == 0 {
        return invalid("max_iter must be >= 1");
    }
    let started = Instant::now();
    let s = system.scores().as_mat();
    let lambda = system.lambda();
    let v = system.rhs();
    let m = v.len();
    let mut meter = MemoryMeter::new();

    let mut x = meter.alloc(m, T::zero());
    let mut r = v.to_vec();
    meter.record(m);
    let mut p = r.clone();
    meter.record(m);
    let mut best = x.clone();
    meter.record(m);
    meter.record(m + s.rows());

    let v_norm = norm2(v);
    let mut rr = v_norm * v_norm;
    let mut best_rr = rr;
    let mut iterations = 0;
    let mut converged = v_norm == 0.0;

    while !converged && iterations < opts.max_iter {
        let mut ap = kernels::adjoint_matvec(s, &kernels::matvec(s, &p));
        for (a, pk) in ap.iter_mut().zip(&p) {
            *a += pk.mul_real(lambda);
        }
        let curvature = dot::<T, true>(&ap, &p).re_part();
        if !(curvature > 0.0) {
            break;
        }
        let alpha = rr / curvature;
        for ((xk, rk), (pk, ak)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xk += pk.mul_real(alpha);
            *rk -= ak.mul_real(alpha);
        }
        iterations += 1;
        let rr_next = r.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if rr_next < best_rr {
            best_rr = rr_next;
            best.copy_from_slice(&x);
        }
        if rr_next.sqrt() <= opts.tol * v_norm {
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        for (pk, rk) in p.iter_mut().zip(&r) {
            *pk = *rk + pk.mul_real(beta);
        }
        rr = rr_next;
    }
    let out = if converged { x } else { best };
    finish(system, out, Method::Cg, started, meter.stats(), Some(iterations), converged)
}
