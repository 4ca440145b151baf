//! Assemble P1 stiffness and mass matrices on the structured mesh, solve
//! −Δu = f for a manufactured solution and watch the L1 error shrink.
//!
//!     cargo run --release --example fem_poisson

use std::f64::consts::PI;

use boxinv::fem2d::{
    assemble_mass_p1, assemble_stiffness, l1_norm, prolong_free, restrict_matrix_to_free, restrict_rows_to_free,
    FieldKind, StructuredMesh,
};
use boxinv::linalg::{factorize, solve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // u = cos(πx/2) sin(πy/2) vanishes on x = ±1 and has ∂u/∂y = 0 on y = ±1
    let exact = |x: f64, y: f64| (PI * x / 2.0).cos() * (PI * y / 2.0).sin();
    let mut prev: Option<f64> = None;
    for n in [4, 8, 16, 32, 64] {
        let mesh = StructuredMesh::new(n);
        let k = restrict_matrix_to_free(&mesh, &assemble_stiffness(&mesh, &vec![1.0; mesh.num_cells()])?)?;
        let m = restrict_rows_to_free(&mesh, &assemble_mass_p1(&mesh).to_sparse())?;
        // f = (π²/2) u, loaded through the consistent mass matrix
        let f: Vec<f64> = (0..mesh.num_nodes())
            .map(|v| {
                let [x, y] = mesh.node_coords(v);
                0.5 * PI * PI * exact(x, y)
            })
            .collect();
        let u_free = solve(&factorize(&k)?, &m.mul_vec(&f)?)?;
        let u = prolong_free(&mesh, &u_free)?;
        let err: Vec<f64> = (0..mesh.num_nodes())
            .map(|v| {
                let [x, y] = mesh.node_coords(v);
                u[v] - exact(x, y)
            })
            .collect();
        let e = l1_norm(&mesh, FieldKind::P1, &err)?;
        match prev {
            Some(p) => println!("N = {n:3}  L1 error {e:.3e}  rate {:.2}", (p / e).log2()),
            None => println!("N = {n:3}  L1 error {e:.3e}"),
        }
        prev = Some(e);
    }
    Ok(())
}
