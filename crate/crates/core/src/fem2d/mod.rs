//! P1/P0 finite elements on a uniform triangulation of (−1,1)² with
//! homogeneous Dirichlet conditions on x = ±1 and natural conditions on
//! y = ±1.

mod assemble;
mod coefficient;
mod integrate;
pub mod io;
mod mesh;
mod transfer;

pub use assemble::{
    assemble_cell_coupling_mass, assemble_cell_coupling_stiffness, assemble_mass_p1, assemble_stiffness,
    assemble_weighted_mass, element_mass, element_stiffness, prolong_free, reduced_stiffness_factor,
    restrict_columns_to_free, restrict_matrix_to_free, restrict_rows_to_free, restrict_to_free, vstar_norm_sq,
};
pub use coefficient::{in_b1, in_b2, sample_coefficient, Coefficient};
pub use integrate::{l1_norm, square_mean};
pub use mesh::{NodeTag, StructuredMesh};
pub use transfer::{fine_children, project_cells, prolong_nodal, restrict_load, restrict_nodal};

use thiserror::Error;

use crate::linalg::LinalgError;

/// Continuous piecewise linear (nodes) or piecewise constant (triangles).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    P0,
    P1,
}

impl FieldKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::P0 => "P0",
            Self::P1 => "P1",
        }
    }

    pub fn len(self, mesh: &StructuredMesh) -> usize {
        match self {
            Self::P0 => mesh.num_cells(),
            Self::P1 => mesh.num_nodes(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FemError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fine mesh N={fine} is not a refinement of coarse mesh N={coarse}")]
    IncompatibleMeshes { fine: usize, coarse: usize },
    #[error("unknown coefficient descriptor '{0}'")]
    UnknownDescriptor(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FemError>;

pub(crate) fn check_nodes(mesh: &StructuredMesh, v: &[f64]) -> Result<()> {
    if v.len() != mesh.num_nodes() {
        return Err(FemError::DimensionMismatch {
            expected: mesh.num_nodes(),
            got: v.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_cells(mesh: &StructuredMesh, v: &[f64]) -> Result<()> {
    if v.len() != mesh.num_cells() {
        return Err(FemError::DimensionMismatch {
            expected: mesh.num_cells(),
            got: v.len(),
        });
    }
    Ok(())
}
