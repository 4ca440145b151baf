//! Identify the diffusion coefficient a in −∇·(a∇φ) = f with a small H¹
//! penalty on the state (α = 1e-4·δ unless given).
//!
//!     cargo run --release --example inverse_diffusion -- [N] [delta] [alpha]

use boxinv::bench::{run_experiment, AlphaRule, ExperimentConfig};
use boxinv::fem2d::{io::format_field, FieldKind};
use boxinv::gn::ProblemKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = ExperimentConfig {
        kind: ProblemKind::Diffusion,
        n: args.first().map_or(Ok(12), |s| s.parse())?,
        delta: args.get(1).map_or(Ok(0.001), |s| s.parse())?,
        alpha: match args.get(2) {
            Some(a) => AlphaRule::Fixed(a.parse()?),
            None => AlphaRule::Auto,
        },
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg)?;
    let m = &out.metrics;
    println!(
        "diffusion, N = {}, delta = {}, alpha = {:e}: {} GN steps, J_k/J_0 = {:.2e}",
        cfg.n,
        cfg.delta,
        cfg.alpha_value(),
        m.k,
        m.rel_residual
    );
    println!("spot errors {:.3} {:.3} {:.3}, L1 error {:.4}", m.err_spot1, m.err_spot2, m.err_spot3, m.err_l1);
    if cfg.n <= 12 {
        print!("{}", format_field(FieldKind::P0, cfg.n, &out.iterate.param)?);
    }
    Ok(())
}
