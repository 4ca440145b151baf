//! Solve a small box-constrained QP with the feasible active-set method and
//! check the answer against exhaustive enumeration.
//!
//!     cargo run --release --example box_qp

use boxinv::linalg::DenseMatrix;
use boxinv::qp::{certify, enumerate_oracle, feasible_active_set, ActivePair, BoxQP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 1D Laplacian with an oscillating linear term, one tight box at index 3
    let n = 8;
    let q_mat = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let q: Vec<f64> = (0..n).map(|i| 0.8 * (1.3 * i as f64).sin()).collect();
    let mut lower = vec![-0.5; n];
    let mut upper = vec![0.5; n];
    lower[3] = 0.1;
    upper[3] = 0.2;
    let qp = BoxQP::dense(q_mat, q, lower, upper)?;

    let sol = feasible_active_set(&qp, &ActivePair::all_lower(&qp))?;
    let cert = certify(&qp, &sol.point)?;
    println!("x          = {:.4?}", sol.point.x);
    println!("upper set  = {:?}", sol.pair.upper);
    println!("lower set  = {:?}", sol.pair.lower);
    println!(
        "objective  = {:.6}  ({} KKT solves, {} outer iterations)",
        sol.report.final_objective, sol.report.kkt_solves, sol.report.outer_iterations
    );
    println!(
        "residuals  stationarity {:.1e}  primal {:.1e}  dual {:.1e}  complementarity {:.1e}",
        cert.stationarity, cert.primal_violation, cert.dual_violation, cert.complementarity
    );

    let oracle = enumerate_oracle(&qp)?;
    let gap = sol
        .point
        .x
        .iter()
        .zip(&oracle.x)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("max |x - x_oracle| = {gap:.2e}");
    Ok(())
}
