//! Transfer between a coarse mesh N and the fine mesh 2N.

use super::{check_cells, check_nodes, FemError, Result, StructuredMesh};

fn check_pair(fine: &StructuredMesh, coarse: &StructuredMesh) -> Result<()> {
    if fine.n() != 2 * coarse.n() {
        return Err(FemError::IncompatibleMeshes {
            fine: fine.n(),
            coarse: coarse.n(),
        });
    }
    Ok(())
}

/// Pointwise sampling at the coarse nodes.
pub fn restrict_nodal(fine: &StructuredMesh, coarse: &StructuredMesh, v: &[f64]) -> Result<Vec<f64>> {
    check_pair(fine, coarse)?;
    check_nodes(fine, v)?;
    Ok((0..coarse.num_nodes())
        .map(|c| {
            let (i, j) = coarse.node_ij(c);
            v[fine.node_index(2 * i, 2 * j)]
        })
        .collect())
}

/// Fine-node stencil of the P1 interpolation: (coarse node, weight) pairs.
fn prolongation_stencil(fine: &StructuredMesh, coarse: &StructuredMesh, node: usize) -> [(usize, f64); 2] {
    let (fi, fj) = fine.node_ij(node);
    let (ci, cj) = (fi / 2, fj / 2);
    match (fi % 2, fj % 2) {
        (0, 0) => [(coarse.node_index(ci, cj), 1.0), (0, 0.0)],
        (1, 0) => [(coarse.node_index(ci, cj), 0.5), (coarse.node_index(ci + 1, cj), 0.5)],
        (0, 1) => [(coarse.node_index(ci, cj), 0.5), (coarse.node_index(ci, cj + 1), 0.5)],
        // centre of a coarse square lies on its ll-ur diagonal
        _ => [(coarse.node_index(ci, cj), 0.5), (coarse.node_index(ci + 1, cj + 1), 0.5)],
    }
}

/// P1 interpolation of a coarse nodal field onto the fine mesh.
pub fn prolong_nodal(coarse: &StructuredMesh, fine: &StructuredMesh, v: &[f64]) -> Result<Vec<f64>> {
    check_pair(fine, coarse)?;
    check_nodes(coarse, v)?;
    Ok((0..fine.num_nodes())
        .map(|f| {
            prolongation_stencil(fine, coarse, f)
                .iter()
                .map(|&(c, w)| if w == 0.0 { 0.0 } else { w * v[c] })
                .sum()
        })
        .collect())
}

/// Transpose of [`prolong_nodal`]: converts a fine load vector into the
/// coarse load with the same duality pairing against coarse P1 functions.
pub fn restrict_load(fine: &StructuredMesh, coarse: &StructuredMesh, g: &[f64]) -> Result<Vec<f64>> {
    check_pair(fine, coarse)?;
    check_nodes(fine, g)?;
    let mut out = vec![0.0; coarse.num_nodes()];
    for f in 0..fine.num_nodes() {
        for (c, w) in prolongation_stencil(fine, coarse, f) {
            if w != 0.0 {
                out[c] += w * g[f];
            }
        }
    }
    Ok(out)
}

/// The four fine cells covering each coarse cell.
pub fn fine_children(fine: &StructuredMesh, coarse: &StructuredMesh, cell: usize) -> [usize; 4] {
    let sq = cell / 2;
    let (i, j) = (sq % coarse.n(), sq / coarse.n());
    let (fi, fj) = (2 * i, 2 * j);
    if cell % 2 == 0 {
        [
            fine.cell_index(fi, fj, 0),
            fine.cell_index(fi + 1, fj, 0),
            fine.cell_index(fi + 1, fj, 1),
            fine.cell_index(fi + 1, fj + 1, 0),
        ]
    } else {
        [
            fine.cell_index(fi, fj, 1),
            fine.cell_index(fi, fj + 1, 0),
            fine.cell_index(fi, fj + 1, 1),
            fine.cell_index(fi + 1, fj + 1, 1),
        ]
    }
}

/// Average of the four fine cells inside each coarse cell.
pub fn project_cells(fine: &StructuredMesh, coarse: &StructuredMesh, v: &[f64]) -> Result<Vec<f64>> {
    check_pair(fine, coarse)?;
    check_cells(fine, v)?;
    Ok((0..coarse.num_cells())
        .map(|c| fine_children(fine, coarse, c).iter().map(|&f| v[f]).sum::<f64>() / 4.0)
        .collect())
}
