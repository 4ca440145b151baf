use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem2d::{
    assemble_mass_p1, assemble_stiffness, assemble_weighted_mass, prolong_free, restrict_load, restrict_matrix_to_free,
    restrict_nodal, restrict_rows_to_free, restrict_to_free, sample_coefficient, Coefficient, FieldKind,
    StructuredMesh,
};
use crate::gn::ProblemKind;
use crate::linalg;

use super::{BenchError, Result};

/// Exact parameter and state on one mesh, with the parameter bounds.
#[derive(Debug, Clone)]
pub struct Truth {
    pub kind: ProblemKind,
    pub test_id: u8,
    pub param: Vec<f64>,
    /// Exact state cos(πx/2)·sin(πy/2) at the nodes, exactly zero on x = ±1.
    pub phi: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl Truth {
    pub fn param_kind(&self) -> FieldKind {
        self.kind.param_kind()
    }
}

pub fn make_truth(kind: ProblemKind, test_id: u8, mesh: &StructuredMesh) -> Result<Truth> {
    let (lower, upper) = match (kind, test_id) {
        (_, 1) => (1.0, 11.0),
        (ProblemKind::Potential, 2) => (-9.0, 6.0),
        (ProblemKind::Potential, 3) => (-10.0, 0.0),
        _ => return Err(BenchError::InvalidTest { test_id, kind }),
    };
    let coef = Coefficient::for_test(test_id)?;
    let param = sample_coefficient(coef, mesh, kind.param_kind());
    let phi = sample_coefficient(Coefficient::ExactState, mesh, FieldKind::P1)
        .into_iter()
        .enumerate()
        .map(|(v, p)| if mesh.is_dirichlet(v) { 0.0 } else { p })
        .collect();
    Ok(Truth {
        kind,
        test_id,
        param,
        phi,
        lower,
        upper,
    })
}

/// Noise-free observations and loads on the coarse mesh, generated on the
/// mesh with twice the resolution.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Coarse truth, for metrics.
    pub truth: Truth,
    /// Observed state at the coarse nodes.
    pub y: Vec<f64>,
    /// Load on the coarse free nodes.
    pub g: Vec<f64>,
}

pub fn synthesize_data(kind: ProblemKind, test_id: u8, coarse: &StructuredMesh) -> Result<SyntheticData> {
    let fine = StructuredMesh::new(2 * coarse.n());
    let truth = make_truth(kind, test_id, coarse)?;
    let fine_truth = make_truth(kind, test_id, &fine)?;
    let (y, g) = match kind {
        ProblemKind::Source => {
            // K φ = M b on the fine mesh; the source enters only through b
            let k = restrict_matrix_to_free(&fine, &assemble_stiffness(&fine, &vec![1.0; fine.num_cells()])?)?;
            let mb = restrict_rows_to_free(&fine, &assemble_mass_p1(&fine).to_sparse())?.mul_vec(&fine_truth.param)?;
            let phi_free = linalg::solve(&linalg::factorize(&k)?, &mb)?;
            let phi = prolong_free(&fine, &phi_free)?;
            (restrict_nodal(&fine, coarse, &phi)?, vec![0.0; coarse.num_free()])
        }
        ProblemKind::Potential | ProblemKind::Diffusion => {
            let ones = vec![1.0; fine.num_cells()];
            let op = if kind == ProblemKind::Potential {
                assemble_stiffness(&fine, &ones)?.add(&assemble_weighted_mass(&fine, &fine_truth.param)?)?
            } else {
                assemble_stiffness(&fine, &fine_truth.param)?
            };
            let g_fine = op.mul_vec(&fine_truth.phi)?;
            let g = restrict_to_free(coarse, &restrict_load(&fine, coarse, &g_fine)?)?;
            (truth.phi.clone(), g)
        }
    };
    Ok(SyntheticData { truth, y, g })
}

/// Adds i.i.d. uniform noise on [−δ, δ] to every entry.
pub fn add_noise(y: &[f64], delta: f64, seed: u64) -> Vec<f64> {
    if delta == 0.0 {
        return y.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    y.iter().map(|v| v + rng.gen_range(-delta..=delta)).collect()
}
