//! Cholesky solve of the damped Fisher system through the small `n x n` Gram matrix.
//!
//! With `W = S S^H + lambda I = L L^H`, the solution of
//! `(S^H S + lambda I) x = v` is
//!
//! ```text
//! x = (v - S^H L^-H L^-1 S v) / lambda
//! ```
//!
//! evaluated right to left: one product `S v`, two triangular solves of
//! length `n`, one product `S^H t`. `L^-1 S` is never formed, so the extra
//! memory is `O(n^2 + n + m)` and the flop count is `O(n^3 + n^2 m)`,
//! dominated by the Gram product.

use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use num_complex::Complex64;

use crate::error::{invalid, FisherError, Result};
use crate::kernels::{self, dot};
use crate::matrix::Mat;
use crate::ops::{gram, residual_realpart};
use crate::scalar::Scalar;
use crate::solvers::finish;
use crate::sr::realpart_system;
use crate::system::{DampedSystem, Method, ScoreMatrix, Solution};
use crate::workspace::MemoryMeter;

/// Below this many multiply-adds a Cholesky column is updated serially.
#[cfg(feature = "parallel")]
const PAR_COLUMN_WORK: usize = 1 << 15;

/// Lower-triangular Cholesky factor `L` of a Gram matrix, with a length-`n`
/// scratch vector for solves.
///
/// One solve at a time; move it between threads freely.
#[derive(Debug, Clone)]
pub struct CholWorkspace<T> {
    l: Mat<T>,
    scratch: Vec<T>,
}

impl<T: Scalar> CholWorkspace<T> {
    /// Factors `S S^H + lambda I`.
    pub fn factor(s: &ScoreMatrix<T>, lambda: f64) -> Result<Self> {
        Self::from_gram(gram(s, lambda)?)
    }

    /// Factors a Hermitian positive definite matrix in place. Only the lower
    /// triangle of `w` is read.
    pub fn from_gram(mut w: Mat<T>) -> Result<Self> {
        if w.rows() != w.cols() {
            return invalid(format!("Gram matrix must be square, got {}x{}", w.rows(), w.cols()));
        }
        cholesky_in_place(&mut w)?;
        let n = w.rows();
        Ok(Self { l: w, scratch: vec![T::zero(); n] })
    }

    /// The factor `L`; the strict upper triangle is zero.
    pub fn factor_l(&self) -> &Mat<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Overwrites `b` with `(L L^H)^-1 b`.
    pub fn solve_in_place(&mut self, b: &mut [T]) {
        assert_eq!(b.len(), self.dim());
        self.forward(b);
        self.backward(b);
    }

    /// Returns `(L L^H)^-1 b`, using the internal scratch vector.
    pub fn solve(&mut self, b: &[T]) -> Vec<T> {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.copy_from_slice(b);
        self.solve_in_place(&mut scratch);
        let out = scratch.clone();
        self.scratch = scratch;
        out
    }

    /// `L y = b`, row-oriented forward substitution.
    fn forward(&self, b: &mut [T]) {
        for i in 0..self.dim() {
            let row = self.l.row(i);
            let acc = dot::<T, false>(&row[..i], &b[..i]);
            b[i] = (b[i] - acc).div_real(row[i].re_part());
        }
    }

    /// `L^H z = y`; walks rows of `L` so access stays contiguous.
    fn backward(&self, b: &mut [T]) {
        for i in (0..self.dim()).rev() {
            let row = self.l.row(i);
            let zi = b[i].div_real(row[i].re_part());
            b[i] = zi;
            for (bk, lik) in b[..i].iter_mut().zip(&row[..i]) {
                *bk -= lik.conj_val() * zi;
            }
        }
    }
}

/// Column-by-column (Crout) factorization `W = L L^H`, in place.
///
/// Rows below the pivot of each column are independent and are updated in
/// parallel when the column is large enough.
fn cholesky_in_place<T: Scalar>(w: &mut Mat<T>) -> Result<()> {
    let n = w.rows();
    for j in 0..n {
        let (head, tail) = w.as_mut_slice().split_at_mut((j + 1) * n);
        let row_j = &mut head[j * n..];
        let d = row_j[j].re_part()
            - row_j[..j].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(d > 0.0 && d.is_finite()) {
            return Err(FisherError::FactorizationFailed { pivot: j });
        }
        let pivot = d.sqrt();
        row_j[j] = T::from_real(pivot);
        let row_j = &head[j * n..j * n + j];
        let update = |row_i: &mut [T]| {
            let acc = dot::<T, true>(&row_i[..j], row_j);
            row_i[j] = (row_i[j] - acc).div_real(pivot);
        };
        #[cfg(feature = "parallel")]
        if (n - j - 1) * j >= PAR_COLUMN_WORK {
            tail.par_chunks_mut(n).for_each(update);
            continue;
        }
        tail.chunks_mut(n).for_each(update);
    }
    for i in 0..n {
        for v in &mut w.row_mut(i)[i + 1..] {
            *v = T::zero();
        }
    }
    Ok(())
}

pub(crate) fn solve_generic<T: Scalar>(system: &DampedSystem<T>) -> Result<Solution<T>> {
    let started = Instant::now();
    let s = system.scores();
    let (n, m) = (s.n(), s.m());
    let lambda = system.lambda();
    let v = system.rhs();
    let mut meter = MemoryMeter::new();

    meter.record(n * n);
    let mut ws = CholWorkspace::factor(s, lambda)?;
    meter.record(n);

    // t = (L L^H)^-1 S v
    let mut t = kernels::matvec(s.as_mat(), v);
    meter.record(t.len());
    ws.solve_in_place(&mut t);

    // x = (v - S^H t) / lambda, built in the S^H t buffer
    let mut x = kernels::adjoint_matvec(s.as_mat(), &t);
    meter.record(m);
    for (xk, vk) in x.iter_mut().zip(v) {
        *xk = (*vk - *xk).div_real(lambda);
    }
    finish(system, x, Method::Chol, started, meter.stats(), None, true)
}

/// Solves `(S^T S + lambda I) x = v` for real `S`.
pub fn solve_chol(system: &DampedSystem<f64>) -> Result<Solution<f64>> {
    solve_generic(system)
}

/// Solves `(S^H S + lambda I) x = v` for complex `S` and `v`: the same
/// recipe with every transpose replaced by a conjugate transpose.
pub fn solve_chol_hermitian(system: &DampedSystem<Complex64>) -> Result<Solution<Complex64>> {
    solve_generic(system)
}

/// Solves `(Re[S^H S] + lambda I) x = v` for complex `S` and real `v`.
///
/// Stacks `Re(S)` over `Im(S)` into a real `2n x m` matrix `C`, for which
/// `C^T C = Re[S^H S]`, and runs [`solve_chol`] on it. The returned residual is
/// measured against the real-part operator of the original system.
pub fn solve_realpart(system: &DampedSystem<Complex64>) -> Result<Solution<f64>> {
    let started = Instant::now();
    let stacked = realpart_system(system)?;
    let mut sol = solve_chol(&stacked)?;
    sol.wall_seconds = started.elapsed().as_secs_f64();
    sol.workspace.peak_scalars += stacked.n() * stacked.m();
    sol.workspace.largest_buffer = sol.workspace.largest_buffer.max(stacked.n() * stacked.m());
    let r = residual_realpart(system, &sol.x)?;
    sol.abs_residual = r.abs;
    sol.rel_residual = r.rel;
    Ok(sol)
}
