use crate::linalg::{CholeskyFactor, CsrMatrix, SymMatrix};

use super::{check_cells, check_nodes, FemError, Result, StructuredMesh};

/// Element stiffness ∫_T ∇λᵢ·∇λⱼ for the three vertices of `t`.
pub fn element_stiffness(mesh: &StructuredMesh, t: usize) -> [[f64; 3]; 3] {
    let v = mesh.vertices(t);
    let area = mesh.cell_area();
    let mut b = [0.0; 3];
    let mut c = [0.0; 3];
    for i in 0..3 {
        let (p1, p2) = (v[(i + 1) % 3], v[(i + 2) % 3]);
        b[i] = p1[1] - p2[1];
        c[i] = p2[0] - p1[0];
    }
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        }
    }
    k
}

/// Element mass ∫_T λᵢλⱼ = area/12 · (1 + δᵢⱼ).
pub fn element_mass(mesh: &StructuredMesh) -> [[f64; 3]; 3] {
    let a = mesh.cell_area() / 12.0;
    let mut m = [[a; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2.0 * a;
    }
    m
}

fn assemble_weighted(mesh: &StructuredMesh, weight: &[f64], local: impl Fn(usize) -> [[f64; 3]; 3]) -> SymMatrix {
    let n = mesh.num_nodes();
    let mut trip = Vec::with_capacity(9 * mesh.num_cells());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let e = local(t);
        let w = weight[t];
        for a in 0..3 {
            for b in 0..3 {
                trip.push((tri[a], tri[b], w * e[a][b]));
            }
        }
    }
    SymMatrix::Sparse(CsrMatrix::from_triplets(n, n, &trip))
}

/// Σ_T a_T ∫_T ∇φᵢ·∇φⱼ over all nodes.
pub fn assemble_stiffness(mesh: &StructuredMesh, a: &[f64]) -> Result<SymMatrix> {
    check_cells(mesh, a)?;
    Ok(assemble_weighted(mesh, a, |t| element_stiffness(mesh, t)))
}

/// Σ_T c_T ∫_T φᵢφⱼ over all nodes.
pub fn assemble_weighted_mass(mesh: &StructuredMesh, c: &[f64]) -> Result<SymMatrix> {
    check_cells(mesh, c)?;
    let e = element_mass(mesh);
    Ok(assemble_weighted(mesh, c, |_| e))
}

/// Standard P1 mass matrix.
pub fn assemble_mass_p1(mesh: &StructuredMesh) -> SymMatrix {
    let e = element_mass(mesh);
    assemble_weighted(mesh, &vec![1.0; mesh.num_cells()], |_| e)
}

fn assemble_coupling(
    mesh: &StructuredMesh,
    phi: &[f64],
    local: impl Fn(usize) -> [[f64; 3]; 3],
) -> Result<CsrMatrix> {
    check_nodes(mesh, phi)?;
    let mut trip = Vec::with_capacity(3 * mesh.num_cells());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let e = local(t);
        for a in 0..3 {
            let v: f64 = (0..3).map(|b| phi[tri[b]] * e[b][a]).sum();
            trip.push((tri[a], t, v));
        }
    }
    Ok(CsrMatrix::from_triplets(mesh.num_nodes(), mesh.num_cells(), &trip))
}

/// Nodes × cells matrix whose column T is v ↦ ∫_T φ φ_v; applied to a cell
/// field c it gives the load of c·φ.
pub fn assemble_cell_coupling_mass(mesh: &StructuredMesh, phi: &[f64]) -> Result<CsrMatrix> {
    let e = element_mass(mesh);
    assemble_coupling(mesh, phi, |_| e)
}

/// Nodes × cells matrix whose column T is v ↦ ∫_T ∇φ·∇φ_v.
pub fn assemble_cell_coupling_stiffness(mesh: &StructuredMesh, phi: &[f64]) -> Result<CsrMatrix> {
    assemble_coupling(mesh, phi, |t| element_stiffness(mesh, t))
}

/// Free rows and columns of a full nodal matrix.
pub fn restrict_matrix_to_free(mesh: &StructuredMesh, m: &SymMatrix) -> Result<SymMatrix> {
    check_square(mesh, m.dim())?;
    Ok(crate::linalg::extract_principal_submatrix(m, mesh.free_nodes())?)
}

/// Free rows of a nodes × k matrix.
pub fn restrict_rows_to_free(mesh: &StructuredMesh, m: &CsrMatrix) -> Result<CsrMatrix> {
    check_square(mesh, m.nrows())?;
    Ok(m.select_rows(mesh.free_nodes()))
}

/// Free columns of a k × nodes matrix.
pub fn restrict_columns_to_free(mesh: &StructuredMesh, m: &CsrMatrix) -> Result<CsrMatrix> {
    check_square(mesh, m.ncols())?;
    Ok(m.select_columns(mesh.free_nodes()))
}

pub fn restrict_to_free(mesh: &StructuredMesh, v: &[f64]) -> Result<Vec<f64>> {
    check_nodes(mesh, v)?;
    Ok(mesh.free_nodes().iter().map(|&i| v[i]).collect())
}

/// Full nodal vector with zeros on Dirichlet nodes.
pub fn prolong_free(mesh: &StructuredMesh, v_free: &[f64]) -> Result<Vec<f64>> {
    if v_free.len() != mesh.num_free() {
        return Err(FemError::DimensionMismatch {
            expected: mesh.num_free(),
            got: v_free.len(),
        });
    }
    let mut out = vec![0.0; mesh.num_nodes()];
    for (k, &i) in mesh.free_nodes().iter().enumerate() {
        out[i] = v_free[k];
    }
    Ok(out)
}

fn check_square(mesh: &StructuredMesh, dim: usize) -> Result<()> {
    if dim != mesh.num_nodes() {
        return Err(FemError::DimensionMismatch {
            expected: mesh.num_nodes(),
            got: dim,
        });
    }
    Ok(())
}

/// rᵀ K⁻¹ r for the factored reduced stiffness K.
pub fn vstar_norm_sq(r_free: &[f64], kfact: &CholeskyFactor) -> Result<f64> {
    Ok(kfact.inverse_quadratic_form(r_free)?)
}

/// Factor of the Dirichlet-reduced plain stiffness matrix.
pub fn reduced_stiffness_factor(mesh: &StructuredMesh) -> Result<CholeskyFactor> {
    let k = assemble_stiffness(mesh, &vec![1.0; mesh.num_cells()])?;
    Ok(crate::linalg::factorize(&restrict_matrix_to_free(mesh, &k)?)?)
}
