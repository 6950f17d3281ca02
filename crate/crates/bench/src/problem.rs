//! Seeded random problems.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, and
//! normals come from `rand_distr::StandardNormal`. Entries are drawn in a
//! fixed order: `S` row-major (real part then imaginary part of each complex
//! entry), then `f` for structured problems, then `v`. Identical inputs give
//! bit-identical problems on any platform.

use std::fmt;
use std::str::FromStr;

use fisher_core::{Complex64, DampedSystem, FisherError, Result, Scalar, ScalarKind, ScoreMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Real `S` and `v`, i.i.d. standard normal, `S` scaled by `1/sqrt(n)`.
    RealGaussian,
    /// Complex `S` and `v` with independent standard normal real and
    /// imaginary parts, `S` scaled by `1/sqrt(n)`.
    ComplexGaussian,
    /// Real `S` as in `RealGaussian`, a normal coefficient vector `f` of
    /// length `n`, and `v = S^T f`.
    Structured,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::RealGaussian => "real",
            ProblemKind::ComplexGaussian => "complex",
            ProblemKind::Structured => "structured",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = FisherError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ProblemKind::RealGaussian),
            "complex" => Ok(ProblemKind::ComplexGaussian),
            "structured" => Ok(ProblemKind::Structured),
            other => Err(FisherError::InvalidArgument(format!("unknown problem kind {other:?}"))),
        }
    }
}

/// A generated system, with the coefficient vector `f` when `v = S^H f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    pub system: DampedSystem<T>,
    pub f: Option<Vec<T>>,
    pub seed: u64,
    pub kind: ProblemKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyProblem {
    Real(Problem<f64>),
    Complex(Problem<Complex64>),
}

impl AnyProblem {
    pub fn n(&self) -> usize {
        match self {
            AnyProblem::Real(p) => p.system.n(),
            AnyProblem::Complex(p) => p.system.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            AnyProblem::Real(p) => p.system.m(),
            AnyProblem::Complex(p) => p.system.m(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            AnyProblem::Real(p) => p.system.lambda(),
            AnyProblem::Complex(p) => p.system.lambda(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            AnyProblem::Real(p) => p.seed,
            AnyProblem::Complex(p) => p.seed,
        }
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        match self {
            AnyProblem::Real(_) => ScalarKind::Real64,
            AnyProblem::Complex(_) => ScalarKind::Complex128,
        }
    }
}

pub fn generate_problem(
    seed: u64,
    n: usize,
    m: usize,
    lambda: f64,
    kind: ProblemKind,
) -> Result<AnyProblem> {
    Ok(match kind {
        ProblemKind::RealGaussian | ProblemKind::Structured => {
            AnyProblem::Real(generate_typed(seed, n, m, lambda, kind)?)
        }
        ProblemKind::ComplexGaussian => {
            AnyProblem::Complex(generate_typed(seed, n, m, lambda, kind)?)
        }
    })
}

/// Typed variant of [`generate_problem`]. `Structured` is only meaningful for
/// real scalars but is accepted for either.
pub fn generate_typed<T: Scalar>(
    seed: u64,
    n: usize,
    m: usize,
    lambda: f64,
    kind: ProblemKind,
) -> Result<Problem<T>> {
    if n == 0 || m == 0 {
        return Err(FisherError::InvalidArgument(format!("shape must be positive, got {n}x{m}")));
    }
    let len = n
        .checked_mul(m)
        .filter(|len| len.checked_mul(std::mem::size_of::<T>()).is_some_and(|b| b <= isize::MAX as usize))
        .ok_or_else(|| {
            FisherError::InvalidArgument(format!("a {n}x{m} score matrix does not fit in memory"))
        })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> T {
        match T::KIND {
            ScalarKind::Real64 => T::from_parts(StandardNormal.sample(&mut rng), 0.0),
            ScalarKind::Complex128 => {
                let re = StandardNormal.sample(&mut rng);
                T::from_parts(re, StandardNormal.sample(&mut rng))
            }
        }
    };
    let scale = 1.0 / (n as f64).sqrt();
    let data: Vec<T> = (0..len).map(|_| normal().mul_real(scale)).collect();
    let s = ScoreMatrix::from_vec(n, m, data)?;
    let (v, f) = match kind {
        ProblemKind::Structured => {
            let f: Vec<T> = (0..n).map(|_| normal()).collect();
            (s.adjoint_apply(&f)?, Some(f))
        }
        _ => ((0..m).map(|_| normal()).collect(), None),
    };
    Ok(Problem { system: DampedSystem::new(s, lambda, v)?, f, seed, kind })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bits() {
        let a = generate_problem(42, 8, 50, 1e-3, ProblemKind::RealGaussian).unwrap();
        let b = generate_problem(42, 8, 50, 1e-3, ProblemKind::RealGaussian).unwrap();
        assert_eq!(a, b);
        let c = generate_problem(43, 8, 50, 1e-3, ProblemKind::RealGaussian).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn minimal_shape() {
        let p = generate_problem(0, 1, 1, 1.0, ProblemKind::RealGaussian).unwrap();
        assert_eq!((p.n(), p.m()), (1, 1));
    }

    #[test]
    fn structured_rhs_lies_in_row_space() {
        let AnyProblem::Real(p) = generate_problem(3, 4, 9, 0.5, ProblemKind::Structured).unwrap()
        else {
            panic!("structured problems are real");
        };
        let f = p.f.as_ref().unwrap();
        assert_eq!(f.len(), 4);
        let s = p.system.scores().as_mat();
        for k in 0..9 {
            let want: f64 = (0..4).map(|i| s[(i, k)] * f[i]).sum();
            assert!((p.system.rhs()[k] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_kind_has_imaginary_parts() {
        let AnyProblem::Complex(p) = generate_problem(1, 2, 3, 1.0, ProblemKind::ComplexGaussian)
            .unwrap()
        else {
            panic!("complex kind");
        };
        assert!(p.system.scores().as_mat().as_slice().iter().all(|z| z.im != 0.0));
    }

    #[test]
    fn refuses_impossible_sizes() {
        assert!(generate_problem(0, usize::MAX / 2, 4, 1.0, ProblemKind::RealGaussian).is_err());
        assert!(generate_problem(0, 0, 4, 1.0, ProblemKind::RealGaussian).is_err());
        assert!(generate_problem(0, 1, 1, 0.0, ProblemKind::RealGaussian).is_err());
    }
}
