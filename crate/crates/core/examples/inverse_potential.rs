//! Identify the potential c in −Δφ + cφ = f. Test 1 uses c ∈ [1, 11]; tests
//! 2 and 3 have sign-changing potentials.
//!
//!     cargo run --release --example inverse_potential -- [test] [N] [delta]

use boxinv::bench::{run_experiment, ExperimentConfig};
use boxinv::gn::ProblemKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = ExperimentConfig {
        kind: ProblemKind::Potential,
        test_id: args.first().map_or(Ok(1), |s| s.parse())?,
        n: args.get(1).map_or(Ok(16), |s| s.parse())?,
        delta: args.get(2).map_or(Ok(0.001), |s| s.parse())?,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg)?;
    println!(
        "potential test {}, N = {}, delta = {}, bounds [{}, {}]",
        cfg.test_id, cfg.n, cfg.delta, out.truth.lower, out.truth.upper
    );
    for (k, (j, qp)) in out.report.costs.iter().skip(1).zip(&out.report.qp_reports).enumerate() {
        println!(
            "  k = {:2}  J = {:.4e}  KKT solves {:5}  mean size {:.0}",
            k + 1,
            j,
            qp.kkt_solves,
            qp.mean_reduced_size()
        );
    }
    let m = &out.metrics;
    println!("spot errors {:.3} {:.3} {:.3}", m.err_spot1, m.err_spot2, m.err_spot3);
    println!("L1 error    {:.4}", m.err_l1);
    Ok(())
}
