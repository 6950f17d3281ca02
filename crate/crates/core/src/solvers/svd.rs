//! Thin-SVD baselines.
//!
//! Given `S = U diag(sigma) V^H` with `V` of shape `m x r`,
//!
//! ```text
//! x = V (sigma^2 + lambda)^-1 V^H v + (v - V V^H v) / lambda
//! ```
//!
//! Two factorizations feed this formula: an eigendecomposition of the small
//! Gram matrix `S S^H` (`eigh`), and a general dense SVD (`svd`).

use std::time::Instant;

use nalgebra::{SymmetricEigen, SVD};

use crate::error::{invalid, FisherError, Result};
use crate::kernels;
use crate::matrix::Mat;
use crate::ops::{residual_from_product, symmetrize};
use crate::scalar::Scalar;
use crate::solvers::finish;
use crate::system::{check_lambda, DampedSystem, Method, ScoreMatrix, Solution};
use crate::workspace::MemoryMeter;

/// Relative cutoff below which `thin_svd_eigh` drops singular values.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-12;

/// Rank-`r` thin SVD `S = U diag(sigma) V^H`.
///
/// `sigma` is strictly positive and nonincreasing. Column signs (phases for
/// complex data) are not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvd<T> {
    /// `n x r`, orthonormal columns.
    pub u: Mat<T>,
    pub sigma: Vec<f64>,
    /// `m x r`, orthonormal columns.
    pub v: Mat<T>,
    /// Which route produced the factors; solutions built from them carry it.
    pub source: Method,
}

impl<T: Scalar> ThinSvd<T> {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn m(&self) -> usize {
        self.v.rows()
    }

    /// `U diag(sigma) V^H`.
    pub fn reconstruct(&self) -> Mat<T> {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (a, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *a = a.mul_real(*s);
            }
        }
        us.matmul(&self.v.adjoint()).expect("factor shapes agree")
    }
}

/// Thin SVD from the eigendecomposition of `S S^H`, for `n <= m`.
///
/// Eigenpairs are sorted descending, negative eigenvalues (round-off) clamp
/// to zero, and any `sigma_i <= sigma_floor * sigma_max` is dropped. The right
/// factor is `V = S^H U diag(sigma)^-1`. An all-zero `S` gives rank 0.
pub fn thin_svd_eigh<T: Scalar>(s: &ScoreMatrix<T>, sigma_floor: f64) -> Result<ThinSvd<T>> {
    thin_svd_eigh_metered(s, sigma_floor, &mut MemoryMeter::new())
}

fn thin_svd_eigh_metered<T: Scalar>(
    s: &ScoreMatrix<T>,
    sigma_floor: f64,
    meter: &mut MemoryMeter,
) -> Result<ThinSvd<T>> {
    let (n, m) = (s.n(), s.m());
    if n > m {
        return invalid(format!("eigh route needs n <= m, got {n}x{m}"));
    }
    if !(sigma_floor >= 0.0) {
        return invalid(format!("sigma floor must be >= 0, got {sigma_floor}"));
    }
    let mut g = kernels::gram(s.as_mat());
    meter.record(n * n);
    symmetrize(&mut g);
    let eig = SymmetricEigen::new(g.to_dmatrix());
    meter.record(n * n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let sigmas: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let cutoff = sigma_floor * sigmas[0];
    let r = sigmas.iter().take_while(|&&sv| sv > cutoff && sv > 0.0).count();

    let mut u = Mat::<T>::zeros(n, r);
    meter.record(n * r);
    for (a, &k) in order.iter().take(r).enumerate() {
        for i in 0..n {
            u[(i, a)] = eig.eigenvectors[(i, k)];
        }
    }
    let mut v = kernels::adjoint_times(s.as_mat(), &u);
    meter.record(m * r);
    let inv: Vec<f64> = sigmas[..r].iter().map(|sv| 1.0 / sv).collect();
    for k in 0..m {
        for (x, w) in v.row_mut(k).iter_mut().zip(&inv) {
            *x = x.mul_real(*w);
        }
    }
    Ok(ThinSvd { u, sigma: sigmas[..r].to_vec(), v, source: Method::SvdEigh })
}

/// Thin SVD from a general dense SVD routine, dropping exact-zero singular
/// values. Any shape is accepted.
pub fn thin_svd_direct<T: Scalar>(s: &ScoreMatrix<T>) -> Result<ThinSvd<T>> {
    let (n, m) = (s.n(), s.m());
    let k = n.min(m);
    let svd = SVD::try_new(s.as_mat().to_dmatrix(), true, true, f64::EPSILON, 1000 * k.max(10))
        .ok_or(FisherError::NoConvergence { routine: "dense SVD" })?;
    let (Some(uu), Some(vt)) = (svd.u, svd.v_t) else {
        return Err(FisherError::NoConvergence { routine: "dense SVD" });
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let keep: Vec<usize> = order.into_iter().filter(|&a| svd.singular_values[a] > 0.0).collect();
    let r = keep.len();
    let mut u = Mat::<T>::zeros(n, r);
    let mut v = Mat::<T>::zeros(m, r);
    for (a, &c) in keep.iter().enumerate() {
        for i in 0..n {
            u[(i, a)] = uu[(i, c)];
        }
        for j in 0..m {
            v[(j, a)] = vt[(c, j)].conj_val();
        }
    }
    let sigma = keep.iter().map(|&a| svd.singular_values[a]).collect();
    Ok(ThinSvd { u, sigma, v, source: Method::SvdDirect })
}

/// Solves `(V diag(sigma^2) V^H + lambda I) x = v` from thin SVD factors.
///
/// `V` is applied right to left and `V V^H` is never formed. Rank 0 returns
/// exactly `v / lambda`. Without the original `S` at hand the reported
/// residual is measured against the factored operator; [`solve_svd_eigh`]
/// and [`solve_svd_direct`] report it against `S` itself.
pub fn solve_svd_from_factors<T: Scalar>(
    svd: &ThinSvd<T>,
    lambda: f64,
    v: &[T],
) -> Result<Solution<T>> {
    let started = Instant::now();
    let mut meter = MemoryMeter::new();
    let x = apply_svd_formula(svd, lambda, v, &mut meter)?;
    let wall_seconds = started.elapsed().as_secs_f64();

    // V sigma^2 V^H x + lambda x
    let mut y = kernels::adjoint_matvec(&svd.v, &x);
    for (ya, sa) in y.iter_mut().zip(&svd.sigma) {
        *ya = ya.mul_real(sa * sa);
    }
    let mut ax = kernels::matvec(&svd.v, &y);
    for (o, xk) in ax.iter_mut().zip(&x) {
        *o += xk.mul_real(lambda);
    }
    let r = residual_from_product(&ax, v);
    Ok(Solution {
        x,
        method: svd.source,
        abs_residual: r.abs,
        rel_residual: r.rel,
        wall_seconds,
        iterations: None,
        converged: true,
        workspace: meter.stats(),
    })
}

fn apply_svd_formula<T: Scalar>(
    svd: &ThinSvd<T>,
    lambda: f64,
    v: &[T],
    meter: &mut MemoryMeter,
) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    if v.len() != svd.m() {
        return invalid(format!("v has length {}, expected m = {}", v.len(), svd.m()));
    }
    if svd.rank() == 0 {
        meter.record(v.len());
        return Ok(v.iter().map(|z| z.div_real(lambda)).collect());
    }
    // Both terms share V^H v. With c = V^H v,
    //   x = V diag(1/(sigma^2+lambda)) c + v/lambda - V c/lambda
    //     = v/lambda - V diag(sigma^2 / (lambda (sigma^2+lambda))) c.
    let mut c = kernels::adjoint_matvec(&svd.v, v);
    meter.record(c.len());
    for (ca, sa) in c.iter_mut().zip(&svd.sigma) {
        let s2 = sa * sa;
        *ca = ca.mul_real(s2 / (lambda * (s2 + lambda)));
    }
    let mut x = kernels::matvec(&svd.v, &c);
    meter.record(x.len());
    for (xk, vk) in x.iter_mut().zip(v) {
        *xk = vk.div_real(lambda) - *xk;
    }
    Ok(x)
}

/// `eigh` route: [`thin_svd_eigh`] followed by the SVD solution formula.
pub fn solve_svd_eigh<T: Scalar>(system: &DampedSystem<T>, sigma_floor: f64) -> Result<Solution<T>> {
    let started = Instant::now();
    let mut meter = MemoryMeter::new();
    let svd = thin_svd_eigh_metered(system.scores(), sigma_floor, &mut meter)?;
    let x = apply_svd_formula(&svd, system.lambda(), system.rhs(), &mut meter)?;
    finish(system, x, Method::SvdEigh, started, meter.stats(), None, true)
}

/// `svd` route: [`thin_svd_direct`] followed by the SVD solution formula.
pub fn solve_svd_direct<T: Scalar>(system: &DampedSystem<T>) -> Result<Solution<T>> {
    let started = Instant::now();
    let svd = thin_svd_direct(system.scores())?;
    let mut meter = MemoryMeter::new();
    let (n, m, r) = (svd.n(), svd.m(), svd.rank());
    meter.record(n * m + n * r + m * r);
    let x = apply_svd_formula(&svd, system.lambda(), system.rhs(), &mut meter)?;
    finish(system, x, Method::SvdDirect, started, meter.stats(), None, true)
}
