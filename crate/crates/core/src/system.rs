//! Problem and result types for the damped Fisher system `(S^H S + lambda I) x = v`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, FisherError, Result};
use crate::matrix::Mat;
use crate::scalar::{Scalar, ScalarKind};
use crate::workspace::WorkspaceStats;

/// An `n x m` score matrix: one sample per row, one parameter per column.
///
/// Guaranteed non-empty with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<T> {
    mat: Mat<T>,
}

impl<T: Scalar> ScoreMatrix<T> {
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if mat.rows() == 0 || mat.cols() == 0 {
            return invalid(format!(
                "score matrix must be non-empty, got {}x{}",
                mat.rows(),
                mat.cols()
            ));
        }
        if let Some(pos) = mat.as_slice().iter().position(|z| !z.finite()) {
            return invalid(format!(
                "non-finite score entry at ({}, {})",
                pos / mat.cols(),
                pos % mat.cols()
            ));
        }
        Ok(Self { mat })
    }

    pub fn from_vec(n: usize, m: usize, data: Vec<T>) -> Result<Self> {
        Self::new(Mat::from_vec(n, m, data)?)
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Self::new(Mat::from_rows(rows)?)
    }

    /// Sample count.
    #[inline]
    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    /// Parameter count.
    #[inline]
    pub fn m(&self) -> usize {
        self.mat.cols()
    }

    pub fn kind(&self) -> ScalarKind {
        T::KIND
    }

    #[inline]
    pub fn as_mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<T> {
        self.mat
    }

    /// `S^H f` for a length-`n` vector, i.e. a right-hand side with
    /// least-squares structure.
    pub fn adjoint_apply(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.n() {
            return invalid(format!("f has length {}, expected n = {}", f.len(), self.n()));
        }
        Ok(crate::kernels::adjoint_matvec(&self.mat, f))
    }
}

/// A score matrix together with damping `lambda > 0` and right-hand side `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSystem<T> {
    s: ScoreMatrix<T>,
    lambda: f64,
    v: Vec<T>,
}

impl<T: Scalar> DampedSystem<T> {
    pub fn new(s: ScoreMatrix<T>, lambda: f64, v: Vec<T>) -> Result<Self> {
        check_lambda(lambda)?;
        if v.len() != s.m() {
            return invalid(format!("v has length {}, expected m = {}", v.len(), s.m()));
        }
        if v.iter().any(|z| !z.finite()) {
            return invalid("v has non-finite entries");
        }
        Ok(Self { s, lambda, v })
    }

    #[inline]
    pub fn scores(&self) -> &ScoreMatrix<T> {
        &self.s
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn rhs(&self) -> &[T] {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn m(&self) -> usize {
        self.s.m()
    }

    pub fn into_parts(self) -> (ScoreMatrix<T>, f64, Vec<T>) {
        (self.s, self.lambda, self.v)
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        invalid(format!("damping must be finite and > 0, got {lambda}"))
    }
}

/// Which operator a system or residual refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `S^T S + lambda I` (no conjugation, even for complex `S`).
    Plain,
    /// `S^H S + lambda I`.
    Hermitian,
    /// `Re[S^H S] + lambda I`.
    RealPart,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Hermitian => "hermitian",
            Variant::RealPart => "realpart",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = FisherError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "hermitian" => Ok(Variant::Hermitian),
            "realpart" => Ok(Variant::RealPart),
            other => invalid(format!("unknown variant {other:?}")),
        }
    }
}

/// Solution methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Chol,
    SvdEigh,
    SvdDirect,
    Naive,
    Rvb,
    Cg,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Chol,
        Method::SvdEigh,
        Method::SvdDirect,
        Method::Naive,
        Method::Rvb,
        Method::Cg,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Method::Chol => "chol",
            Method::SvdEigh => "eigh",
            Method::SvdDirect => "svd",
            Method::Naive => "naive",
            Method::Rvb => "rvb",
            Method::Cg => "cg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = FisherError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| FisherError::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Solution vector plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub method: Method,
    /// `||A x - v||_2`, as returned by [`residual`](crate::residual).
    pub abs_residual: f64,
    /// `abs_residual / max(||v||_2, eps)`.
    pub rel_residual: f64,
    /// Time spent in the solve itself, excluding the residual check.
    pub wall_seconds: f64,
    /// Iteration count, set by iterative methods only.
    pub iterations: Option<usize>,
    /// False only when an iterative method hit its iteration cap.
    pub converged: bool,
    pub workspace: WorkspaceStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_lambda() {
        let s = ScoreMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(DampedSystem::new(s.clone(), bad, vec![1.0, 1.0]).is_err(), "{bad}");
        }
        assert!(DampedSystem::new(s, 1e-300, vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(ScoreMatrix::<f64>::from_vec(0, 3, vec![]).is_err());
        assert!(ScoreMatrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        let s = ScoreMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(DampedSystem::new(s.clone(), 1.0, vec![1.0]).is_err());
        assert!(DampedSystem::new(s, 1.0, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("svda".parse::<Method>().is_err());
    }
}
