//! Mean reconstruction metrics over seeds for each problem and noise level,
//! printed as CSV (one column per problem and δ).
//!
//!     cargo run --release --example noise_sweep -- [N] [runs]

use boxinv::bench::{run_delta_sweep, sweep_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = ExperimentConfig {
        n: args.first().map_or(Ok(8), |s| s.parse())?,
        runs: args.get(1).map_or(Ok(2), |s| s.parse())?,
        ..ExperimentConfig::default()
    };
    let rows = run_delta_sweep(&cfg)?;
    print!("{}", sweep_csv(&rows)?);
    Ok(())
}
