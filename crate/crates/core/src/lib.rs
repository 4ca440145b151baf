//! Identification of elliptic coefficients from noisy state data under box
//! constraints.
//!
//! The unknown parameter and the state are solved for together: every
//! Gauss-Newton step is a strictly convex QP with bounds on the parameter and
//! a data corridor on the state, solved by a primal feasible active-set
//! method.
//!
//! - [`linalg`]: dense and sparse symmetric storage, Cholesky, CG.
//! - [`qp`]: box-constrained QPs, the active-set solver, an enumeration oracle.
//! - [`fem2d`]: P1/P0 elements on a structured triangulation of (−1,1)².
//! - [`gn`]: the three model problems and the Gauss-Newton driver.
//! - [`bench`]: synthetic data, error metrics and experiment runners.
//!
//! ```no_run
//! use boxinv::bench::{run_experiment, ExperimentConfig};
//! use boxinv::gn::ProblemKind;
//!
//! let out = run_experiment(&ExperimentConfig {
//!     kind: ProblemKind::Potential,
//!     n: 16,
//!     ..ExperimentConfig::default()
//! })?;
//! println!("L1 error {:.3}", out.metrics.err_l1);
//! # Ok::<(), boxinv::bench::BenchError>(())
//! ```

pub mod linalg;
pub mod qp;
pub mod fem2d;
pub mod gn;
pub mod bench;
