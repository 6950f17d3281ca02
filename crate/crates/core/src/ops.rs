//! The damped Gram matrix and residual checks shared by every solver.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::kernels;
use crate::matrix::Mat;
use crate::scalar::{norm2, Scalar};
use crate::system::{check_lambda, DampedSystem, ScoreMatrix, Variant};

/// `W = S S^H + lambda I`, an `n x n` Hermitian positive definite matrix.
///
/// The product is symmetrized as `(W + W^H) / 2` so the factorization never
/// sees round-off asymmetry.
pub fn gram<T: Scalar>(s: &ScoreMatrix<T>, lambda: f64) -> Result<Mat<T>> {
    check_lambda(lambda)?;
    let mut w = kernels::gram(s.as_mat());
    symmetrize(&mut w);
    for i in 0..w.rows() {
        w[(i, i)] += T::from_real(lambda);
    }
    Ok(w)
}

pub(crate) fn symmetrize<T: Scalar>(w: &mut Mat<T>) {
    let n = w.rows();
    for i in 0..n {
        for j in i..n {
            let avg = (w[(i, j)] + w[(j, i)].conj_val()).mul_real(0.5);
            w[(i, j)] = avg;
            w[(j, i)] = avg.conj_val();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub rel: f64,
}

/// `A x` for the variant's operator, evaluated as `S^T (S x) + lambda x` (or
/// its conjugated / real-part form). Never forms an `m x m` matrix.
pub fn apply_operator<T: Scalar>(
    system: &DampedSystem<T>,
    x: &[T],
    variant: Variant,
) -> Result<Vec<T>> {
    apply_parts(system.scores(), system.lambda(), x, variant)
}

pub(crate) fn apply_parts<T: Scalar>(
    scores: &ScoreMatrix<T>,
    lambda: f64,
    x: &[T],
    variant: Variant,
) -> Result<Vec<T>> {
    let s = scores.as_mat();
    if x.len() != s.cols() {
        return invalid(format!("x has length {}, expected m = {}", x.len(), s.cols()));
    }
    let mut out = match variant {
        Variant::Plain => kernels::transpose_matvec(s, &kernels::matvec(s, x)),
        Variant::Hermitian => kernels::adjoint_matvec(s, &kernels::matvec(s, x)),
        Variant::RealPart => real_part_gram_apply(s, x),
    };
    for (o, xi) in out.iter_mut().zip(x) {
        *o += xi.mul_real(lambda);
    }
    Ok(out)
}

/// `Re[S^H S] x = Re(S)^T Re(S) x + Im(S)^T Im(S) x`.
fn real_part_gram_apply<T: Scalar>(s: &Mat<T>, x: &[T]) -> Vec<T> {
    let n = s.rows();
    let mut re_x = vec![T::zero(); n];
    let mut im_x = vec![T::zero(); n];
    for i in 0..n {
        for (sik, xk) in s.row(i).iter().zip(x) {
            re_x[i] += xk.mul_real(sik.re_part());
            im_x[i] += xk.mul_real(sik.im_part());
        }
    }
    let mut out = vec![T::zero(); s.cols()];
    for i in 0..n {
        for (o, sik) in out.iter_mut().zip(s.row(i)) {
            *o += re_x[i].mul_real(sik.re_part()) + im_x[i].mul_real(sik.im_part());
        }
    }
    out
}

/// `||A x - v||_2` and its ratio to `max(||v||_2, eps)`.
///
/// Pure: identical inputs give bit-identical outputs.
pub fn residual<T: Scalar>(system: &DampedSystem<T>, x: &[T], variant: Variant) -> Result<Residual> {
    let ax = apply_operator(system, x, variant)?;
    Ok(residual_from_product(&ax, system.rhs()))
}

pub(crate) fn residual_from_product<T: Scalar>(ax: &[T], v: &[T]) -> Residual {
    let diff: Vec<T> = ax.iter().zip(v).map(|(a, v)| *a - *v).collect();
    let abs = norm2(&diff);
    let rel = abs / norm2(v).max(f64::EPSILON);
    Residual { abs, rel }
}

/// Residual of a real solution against the real-part operator of a complex system.
pub fn residual_realpart(system: &DampedSystem<Complex64>, x: &[f64]) -> Result<Residual> {
    let lifted: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    residual(system, &lifted, Variant::RealPart)
}
