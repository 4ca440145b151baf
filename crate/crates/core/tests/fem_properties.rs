use boxinv::fem2d::{
    assemble_mass_p1, assemble_stiffness, assemble_weighted_mass, l1_norm, project_cells, prolong_nodal,
    reduced_stiffness_factor, restrict_matrix_to_free, restrict_nodal, restrict_to_free, square_mean, vstar_norm_sq,
    FieldKind, StructuredMesh,
};
use boxinv::linalg::dot;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cells(mesh: &StructuredMesh, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..mesh.num_cells()).map(|_| rng.gen_range(lo..hi)).collect()
}

fn affine(mesh: &StructuredMesh, a: f64, b: f64, c: f64) -> Vec<f64> {
    (0..mesh.num_nodes())
        .map(|v| {
            let [x, y] = mesh.node_coords(v);
            a * x + b * y + c
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stiffness_kills_constants(n in 2usize..=12, seed in any::<u64>(), c in -5.0f64..5.0) {
        let mesh = StructuredMesh::new(n);
        let k = assemble_stiffness(&mesh, &random_cells(&mesh, 0.1, 10.0, seed)).unwrap();
        let r = k.mul_vec(&vec![c; mesh.num_nodes()]).unwrap();
        prop_assert!(r.iter().all(|v| v.abs() <= 1e-12 * (1.0 + c.abs())));
    }

    #[test]
    fn energy_of_affine_fields(n in 2usize..=12, a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        // ∫ |∇(ax + by + c)|² over (−1,1)² = 4(a² + b²)
        let mesh = StructuredMesh::new(n);
        let k = assemble_stiffness(&mesh, &vec![1.0; mesh.num_cells()]).unwrap();
        let v = affine(&mesh, a, b, c);
        let e = dot(&v, &k.mul_vec(&v).unwrap());
        prop_assert!((e - 4.0 * (a * a + b * b)).abs() <= 1e-12 * (1.0 + e));
    }

    #[test]
    fn weighted_mass_integrates_coefficient(n in 2usize..=12, seed in any::<u64>()) {
        let mesh = StructuredMesh::new(n);
        let c = random_cells(&mesh, -10.0, 10.0, seed);
        let m = assemble_weighted_mass(&mesh, &c).unwrap();
        let ones = vec![1.0; mesh.num_nodes()];
        let total = dot(&ones, &m.mul_vec(&ones).unwrap());
        let want: f64 = c.iter().sum::<f64>() * mesh.cell_area();
        prop_assert!((total - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn vstar_norm_of_stiffness_image(n in 2usize..=12, seed in any::<u64>()) {
        let mesh = StructuredMesh::new(n);
        let k = restrict_matrix_to_free(&mesh, &assemble_stiffness(&mesh, &vec![1.0; mesh.num_cells()]).unwrap()).unwrap();
        let f = reduced_stiffness_factor(&mesh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..mesh.num_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = k.mul_vec(&v).unwrap();
        let energy = dot(&v, &r);
        prop_assert!((vstar_norm_sq(&r, &f).unwrap() - energy).abs() <= 1e-10 * energy);
    }

    #[test]
    fn transfer_round_trips(n in 2usize..=8, seed in any::<u64>()) {
        let (coarse, fine) = (StructuredMesh::new(n), StructuredMesh::new(2 * n));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..coarse.num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = restrict_nodal(&fine, &coarse, &prolong_nodal(&coarse, &fine, &v).unwrap()).unwrap();
        prop_assert_eq!(back, v);
        // cell averages of a field constant on coarse cells reproduce it
        let cells = random_cells(&coarse, -1.0, 1.0, seed);
        let fine_cells: Vec<f64> = (0..fine.num_cells())
            .map(|t| {
                let [x, y] = fine.centroid(t);
                let owner = (0..coarse.num_cells())
                    .find(|&s| inside(&coarse.vertices(s), [x, y]))
                    .unwrap();
                cells[owner]
            })
            .collect();
        let p = project_cells(&fine, &coarse, &fine_cells).unwrap();
        for (a, b) in p.iter().zip(&cells) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn l1_and_square_mean_of_affine(n in 2usize..=10, a in -2.0f64..2.0, c in 0.0f64..1.0) {
        // x ↦ a·x + 3 + c is positive on the domain, so its L1 norm is its integral 4(3 + c)
        let mesh = StructuredMesh::new(n);
        let v = affine(&mesh, a, 0.0, 3.0 + c);
        prop_assert!((l1_norm(&mesh, FieldKind::P1, &v).unwrap() - 4.0 * (3.0 + c)).abs() <= 1e-12);
        let m = square_mean(&mesh, FieldKind::P1, &v, [0.2, -0.3], 0.25).unwrap();
        prop_assert!((m - (0.2 * a + 3.0 + c)).abs() <= 1e-12);
    }
}

fn inside(tri: &[[f64; 2]; 3], p: [f64; 2]) -> bool {
    let s = |a: [f64; 2], b: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let (d1, d2, d3) = (s(tri[0], tri[1]), s(tri[1], tri[2]), s(tri[2], tri[0]));
    (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0)
}

#[test]
fn total_mass_and_dirichlet_restriction() {
    for n in [2, 3, 8, 16] {
        let mesh = StructuredMesh::new(n);
        let m = assemble_mass_p1(&mesh);
        let ones = vec![1.0; mesh.num_nodes()];
        assert!((dot(&ones, &m.mul_vec(&ones).unwrap()) - 4.0).abs() < 1e-12);
        let v = affine(&mesh, 1.0, 0.0, 0.0);
        let free = restrict_to_free(&mesh, &v).unwrap();
        assert_eq!(free.len(), mesh.num_free());
        assert_eq!(mesh.num_free(), (n - 1) * (n + 1));
    }
}
