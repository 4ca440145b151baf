//! Source, potential and diffusion identification problems, each Gauss-Newton
//! step posed as a box-constrained QP in the joint unknown
//! `z = (parameter, states on free nodes)`.

mod assemble;
mod problem;
mod solve;

pub use assemble::{assemble_gn_qp, reg_matrix, GnQp, QpMode};
pub use problem::{cost_eval, GnIterate, InverseProblem};
pub use solve::{gauss_newton_solve, GnConfig, GnReport, GnSolver, StartMode, StopReason};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fem2d::FemError;
use crate::linalg::LinalgError;
use crate::qp::QpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// −Δφ = b, identify the source b (P1).
    Source,
    /// −Δφ + cφ = f, identify the potential c (P0).
    Potential,
    /// −∇·(a∇φ) = f, identify the diffusivity a (P0).
    Diffusion,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [Self::Source, Self::Potential, Self::Diffusion];

    pub fn name(self) -> &'static str {
        match self {
            Self::Source => "source",
            Self::Potential => "potential",
            Self::Diffusion => "diffusion",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = GnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Self::Source),
            "potential" => Ok(Self::Potential),
            "diffusion" => Ok(Self::Diffusion),
            _ => Err(GnError::InvalidProblem(format!("unknown problem kind '{s}'"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum GnError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid iterate: {0}")]
    InvalidIterate(String),
    #[error("Gauss-Newton step {step}: {source}")]
    Step { step: usize, source: QpError },
    #[error(transparent)]
    Qp(#[from] QpError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, GnError>;
