//! Solvers for the damped Fisher system `(S^T S + lambda I) x = v`, where the
//! `n x m` score matrix `S` has far fewer samples than parameters (`m >> n`).
//!
//! The main method, [`solve_chol`], works entirely through the `n x n`
//! Gram matrix `S S^T + lambda I`: `O(n^3 + n^2 m)` time and `O(n^2 + m)`
//! scratch memory. Baselines (thin SVD via eigendecomposition or a dense SVD,
//! a dense `m x m` oracle, a least-squares-structured solver and conjugate
//! gradient) share the same types. Complex scores are handled either with
//! Hermitian conjugates ([`solve_chol_hermitian`]) or by stacking real and
//! imaginary parts ([`solve_realpart`]); [`sr`] turns raw log-derivatives into
//! centered scores.
//!
//! ```
//! use fisher_core::{solve_chol, DampedSystem, ScoreMatrix};
//!
//! let s = ScoreMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
//! let system = DampedSystem::new(s, 1.0, vec![1.0, 1.0]).unwrap();
//! let sol = solve_chol(&system).unwrap();
//! assert!((sol.x[0] - 0.5).abs() < 1e-12 && sol.x[1].abs() < 1e-12);
//! assert!(sol.rel_residual < 1e-12);
//! ```

pub mod error;
pub mod kernels;
pub mod matrix;
pub mod ops;
pub mod scalar;
pub mod solvers;
pub mod sr;
pub mod system;
pub mod workspace;

pub use error::{FisherError, Result};
pub use matrix::Mat;
pub use num_complex::Complex64;
pub use ops::{apply_operator, gram, residual, residual_realpart, Residual};
pub use scalar::{norm2, Scalar, ScalarKind};
pub use solvers::{
    solve, solve_cg, solve_chol, solve_chol_hermitian, solve_naive, solve_naive_capped,
    solve_naive_realpart, solve_naive_realpart_capped, solve_realpart, solve_rvb, solve_svd_direct, solve_svd_eigh,
    solve_svd_from_factors, thin_svd_direct, thin_svd_eigh, CgOptions, CholWorkspace,
    SolveOptions, ThinSvd, DEFAULT_NAIVE_CAP, DEFAULT_SIGMA_FLOOR,
};
pub use sr::{center_scores, concat_real_imag, realpart_system, RawScores};
pub use system::{DampedSystem, Method, ScoreMatrix, Solution, Variant};
pub use workspace::{MemoryMeter, WorkspaceStats};
