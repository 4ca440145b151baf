use serde::Serialize;

use crate::fem2d::{l1_norm, square_mean, FieldKind, StructuredMesh};
use crate::gn::GnReport;

use super::Result;

/// Spot centres: inside the background, inside B₁, on the boundary of B₁.
pub const SPOTS: [[f64; 2]; 3] = [[0.5, 0.5], [-0.4, -0.3], [-0.4, -0.5]];

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub err_spot1: f64,
    pub err_spot2: f64,
    pub err_spot3: f64,
    pub err_l1: f64,
    /// J_k / J_0.
    pub rel_residual: f64,
    pub k: usize,
    pub wall_time: f64,
    pub total_kkt_solves: usize,
    pub avg_system_size: f64,
}

impl Metrics {
    pub fn spot_errors(&self) -> [f64; 3] {
        [self.err_spot1, self.err_spot2, self.err_spot3]
    }

    /// Componentwise mean.
    pub fn mean(all: &[Metrics]) -> Metrics {
        let n = all.len().max(1) as f64;
        let avg = |f: &dyn Fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Metrics {
            err_spot1: avg(&|m| m.err_spot1),
            err_spot2: avg(&|m| m.err_spot2),
            err_spot3: avg(&|m| m.err_spot3),
            err_l1: avg(&|m| m.err_l1),
            rel_residual: avg(&|m| m.rel_residual),
            k: (avg(&|m| m.k as f64)).round() as usize,
            wall_time: avg(&|m| m.wall_time),
            total_kkt_solves: (avg(&|m| m.total_kkt_solves as f64)).round() as usize,
            avg_system_size: avg(&|m| m.avg_system_size),
        }
    }
}

/// Spot errors |mean of p − p† over a (1/N)-square| and ∫|p − p†|.
pub fn compute_metrics(
    mesh: &StructuredMesh,
    kind: FieldKind,
    p_rec: &[f64],
    truth: &[f64],
    report: &GnReport,
    wall_time: f64,
) -> Result<Metrics> {
    let diff: Vec<f64> = p_rec.iter().zip(truth).map(|(a, b)| a - b).collect();
    let width = 1.0 / mesh.n() as f64;
    let mut spot = [0.0; 3];
    for (s, c) in spot.iter_mut().zip(SPOTS) {
        *s = square_mean(mesh, kind, &diff, c, width)?.abs();
    }
    Ok(Metrics {
        err_spot1: spot[0],
        err_spot2: spot[1],
        err_spot3: spot[2],
        err_l1: l1_norm(mesh, kind, &diff)?,
        rel_residual: report.cost_ratio(),
        k: report.iterations,
        wall_time,
        total_kkt_solves: report.total_kkt_solves(),
        avg_system_size: report.mean_system_size(),
    })
}
