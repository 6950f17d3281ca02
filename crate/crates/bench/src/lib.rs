//! Benchmark harness for the `fisher-core` solvers: seeded problem
//! generation, timing, CSV output, scaling fits, the FMAT file format and
//! the `fisher-solve` command line.

pub mod check;
pub mod cli;
pub mod csv;
pub mod fmat;
pub mod problem;
pub mod scaling;
pub mod timing;

pub use check::{run_check, CheckReport};
pub use cli::{configure_threads, run_cli};
pub use fmat::{FmatError, FmatMatrix};
pub use problem::{generate_problem, AnyProblem, Problem, ProblemKind};
pub use scaling::{fit_power_law, fit_scaling, Axis, ScalingFit};
pub use timing::{time_method, BenchRecord, RunStatus};
