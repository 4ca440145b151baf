//! Recover the source term b in −Δφ = b from noisy state data.
//! The residual is linear in (b, φ), so one Gauss-Newton step is exact.
//!
//!     cargo run --release --example inverse_source -- [N] [delta] [seed]

use boxinv::bench::{run_experiment, ExperimentConfig};
use boxinv::gn::ProblemKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = ExperimentConfig {
        kind: ProblemKind::Source,
        n: args.first().map_or(Ok(16), |s| s.parse())?,
        delta: args.get(1).map_or(Ok(0.001), |s| s.parse())?,
        seed: args.get(2).map_or(Ok(0), |s| s.parse())?,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg)?;
    let m = &out.metrics;
    println!("source problem, N = {}, delta = {}", cfg.n, cfg.delta);
    println!("GN iterations     {} ({})", m.k, out.report.stop.name());
    println!("J_k / J_0         {:.3e}", m.rel_residual);
    println!("spot errors       {:.3} {:.3} {:.3}", m.err_spot1, m.err_spot2, m.err_spot3);
    println!("L1 error          {:.4}", m.err_l1);
    println!("KKT solves        {} (mean size {:.0})", m.total_kkt_solves, m.avg_system_size);
    Ok(())
}
