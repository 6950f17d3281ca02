//! The two scalar kinds a score matrix may hold.

use std::fmt::Debug;

use nalgebra::ComplexField;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Real64,
    Complex128,
}

/// A 64-bit real or complex scalar.
///
/// For real scalars `conj` is the identity, so every routine written against
/// this trait computes `S^T` products for `f64` and `S^H` products for
/// `Complex64` without separate code paths.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Default + Debug + Send + Sync {
    const KIND: ScalarKind;

    fn from_parts(re: f64, im: f64) -> Self;
    fn re_part(self) -> f64;
    fn im_part(self) -> f64;
    fn conj_val(self) -> Self;
    /// `|z|^2`
    fn norm_sqr(self) -> f64;
    fn mul_real(self, k: f64) -> Self;
    /// Division by a real, component-wise.
    fn div_real(self, k: f64) -> Self;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real64;

    #[inline(always)]
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    #[inline(always)]
    fn re_part(self) -> f64 {
        self
    }
    #[inline(always)]
    fn im_part(self) -> f64 {
        0.0
    }
    #[inline(always)]
    fn conj_val(self) -> Self {
        self
    }
    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline(always)]
    fn mul_real(self, k: f64) -> Self {
        self * k
    }
    #[inline(always)]
    fn div_real(self, k: f64) -> Self {
        self / k
    }
    #[inline(always)]
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex128;

    #[inline(always)]
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    #[inline(always)]
    fn re_part(self) -> f64 {
        self.re
    }
    #[inline(always)]
    fn im_part(self) -> f64 {
        self.im
    }
    #[inline(always)]
    fn conj_val(self) -> Self {
        self.conj()
    }
    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline(always)]
    fn mul_real(self, k: f64) -> Self {
        Complex64::new(self.re * k, self.im * k)
    }
    #[inline(always)]
    fn div_real(self, k: f64) -> Self {
        Complex64::new(self.re / k, self.im / k)
    }
    #[inline(always)]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Euclidean norm, summed left to right.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
