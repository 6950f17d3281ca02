//! Stochastic-reconfiguration adapters: turn raw log-wavefunction
//! derivatives into the score matrix the solvers consume.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::matrix::Mat;
use crate::scalar::{Scalar, ScalarKind};
use crate::system::{DampedSystem, ScoreMatrix};

/// Per-sample log-derivatives `O[i][j] = d log psi(x_i) / d theta_j`,
/// before centering.
#[derive(Debug, Clone, PartialEq)]
pub struct RawScores<T> {
    o: ScoreMatrix<T>,
}

impl<T: Scalar> RawScores<T> {
    pub fn new(o: Mat<T>) -> Result<Self> {
        Ok(Self { o: ScoreMatrix::new(o)? })
    }

    pub fn as_mat(&self) -> &Mat<T> {
        self.o.as_mat()
    }
}

/// `S = (O - mean(O)) / sqrt(n)`, the mean taken over samples (rows).
///
/// The mean is refined by a second pass over the residuals, so identical rows
/// center to exactly zero and column sums vanish to round-off.
pub fn center_scores<T: Scalar>(raw: &RawScores<T>) -> ScoreMatrix<T> {
    let o = raw.as_mat();
    let (n, m) = (o.rows(), o.cols());
    let column_mean = |mat: &Mat<T>| {
        let mut mean = vec![T::zero(); m];
        for i in 0..n {
            for (acc, z) in mean.iter_mut().zip(mat.row(i)) {
                *acc += *z;
            }
        }
        mean.iter_mut().for_each(|z| *z = z.div_real(n as f64));
        mean
    };
    let mut centered = o.clone();
    for pass in 0..2 {
        let mean = column_mean(&centered);
        if pass == 1 && mean.iter().all(|z| *z == T::zero()) {
            break;
        }
        for i in 0..n {
            for (z, mu) in centered.row_mut(i).iter_mut().zip(&mean) {
                *z -= *mu;
            }
        }
    }
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    centered.as_mut_slice().iter_mut().for_each(|z| *z = z.mul_real(inv_sqrt_n));
    ScoreMatrix::new(centered).expect("centering keeps entries finite")
}

/// Stacks `Re(S)` over `Im(S)` into a real `2n x m` matrix `C`, so that
/// `C^T C = Re[S^H S]`. Real input is rejected.
pub fn concat_real_imag<T: Scalar>(s: &ScoreMatrix<T>) -> Result<ScoreMatrix<f64>> {
    if T::KIND == ScalarKind::Real64 {
        return invalid("real/imaginary stacking needs a complex score matrix");
    }
    let src = s.as_mat().as_slice();
    let mut data = Vec::with_capacity(2 * src.len());
    data.extend(src.iter().map(|z| z.re_part()));
    data.extend(src.iter().map(|z| z.im_part()));
    ScoreMatrix::from_vec(2 * s.n(), s.m(), data)
}

/// The real `2n x m` system equivalent to the real-part variant of a complex
/// system. The right-hand side must be real.
pub fn realpart_system(system: &DampedSystem<Complex64>) -> Result<DampedSystem<f64>> {
    if system.rhs().iter().any(|z| z.im != 0.0) {
        return invalid("real-part system needs a real right-hand side");
    }
    let c = concat_real_imag(system.scores())?;
    DampedSystem::new(c, system.lambda(), system.rhs().iter().map(|z| z.re).collect())
}
