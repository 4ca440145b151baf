//! Compare warm-started and cold-started QP subproblems inside Gauss-Newton
//! on the potential problem.
//!
//!     cargo run --release --example warm_cold -- [N]

use boxinv::bench::{run_warmcold, warmcold_csv, ExperimentConfig};
use boxinv::gn::ProblemKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map_or(Ok(16), |s| s.parse())?;
    let wc = run_warmcold(&ExperimentConfig {
        kind: ProblemKind::Potential,
        n,
        ..ExperimentConfig::default()
    })?;
    print!("{}", warmcold_csv(&wc)?);
    println!(
        "final cost warm {:.4e}, cold {:.4e}",
        wc.warm.report.costs.last().unwrap(),
        wc.cold.report.costs.last().unwrap()
    );
    Ok(())
}
