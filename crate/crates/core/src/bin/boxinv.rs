//! Command-line driver for the synthetic identification experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use boxinv::bench::{
    run_batch, run_delta_sweep, run_all_problems, run_warmcold, sweep_csv, problems_csv, warmcold_csv, AlphaRule,
    ExperimentConfig, Metrics,
};
use boxinv::gn::{GnSolver, ProblemKind, QpMode, StartMode};

#[derive(Parser)]
#[command(name = "boxinv", version, about = "Box-constrained identification of elliptic coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over one or more seeds.
    Run(RunArgs),
    /// All three problems, test 1, one seed.
    #[command(alias = "table3")]
    Compare(Common),
    /// Noise-level sweep averaged over seeds.
    #[command(alias = "table4")]
    Sweep(Common),
    /// Warm versus cold active-set starts on the potential problem.
    Warmcold(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long = "N", default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 0.001)]
    delta: f64,
    #[arg(long, default_value_t = 1.1)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long = "qp-mode", default_value = "factored")]
    qp_mode: QpMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "source")]
    problem: ProblemKind,
    #[arg(long, default_value_t = 1)]
    test: u8,
    /// Regularization weight, or `auto` for 1e-4·δ on the diffusion problem.
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long, default_value = "warm")]
    start: StartMode,
    #[arg(long, default_value = "feasible_as")]
    solver: GnSolver,
    #[command(flatten)]
    common: Common,
}

fn config(c: &Common) -> ExperimentConfig {
    ExperimentConfig {
        n: c.n,
        delta: c.delta,
        tau: c.tau,
        seed: c.seed,
        runs: c.runs,
        qp_mode: c.qp_mode,
        out: c.out.clone(),
        ..ExperimentConfig::default()
    }
}

fn emit(out: &Option<PathBuf>, name: &str, text: &str) -> Result<(), Box<dyn std::error::Error>> {
    print!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run(a) => {
            let alpha = match a.alpha.as_str() {
                "auto" => AlphaRule::Auto,
                v => AlphaRule::Fixed(v.parse().map_err(|_| format!("invalid alpha '{v}'"))?),
            };
            let cfg = ExperimentConfig {
                kind: a.problem,
                test_id: a.test,
                alpha,
                start_mode: a.start,
                solver: a.solver,
                runs: a.common.runs,
                ..config(&a.common)
            };
            let outcomes = run_batch(&cfg)?;
            let runs: Vec<_> = outcomes
                .iter()
                .map(|o| json!({ "seed": o.seed, "stop": o.report.stop.name(), "metrics": o.metrics }))
                .collect();
            let all: Vec<Metrics> = outcomes.iter().map(|o| o.metrics.clone()).collect();
            let record = json!({
                "problem": cfg.kind.name(),
                "test": cfg.test_id,
                "N": cfg.n,
                "delta": cfg.delta,
                "alpha": cfg.alpha_value(),
                "runs": runs,
                "mean": Metrics::mean(&all),
            });
            emit(&cfg.out, "run.json", &format!("{}\n", serde_json::to_string_pretty(&record)?))?;
        }
        Command::Compare(c) => {
            let cfg = config(&c);
            emit(&cfg.out, "problems.csv", &problems_csv(&run_all_problems(&cfg)?)?)?;
        }
        Command::Sweep(c) => {
            let cfg = config(&c);
            emit(&cfg.out, "sweep.csv", &sweep_csv(&run_delta_sweep(&cfg)?)?)?;
        }
        Command::Warmcold(c) => {
            let cfg = ExperimentConfig {
                kind: ProblemKind::Potential,
                ..config(&c)
            };
            let wc = run_warmcold(&cfg)?;
            emit(&cfg.out, "warmcold.csv", &warmcold_csv(&wc)?)?;
            if wc.warm_total() > wc.cold_total() {
                eprintln!(
                    "warm start used more KKT solves than cold start ({} > {})",
                    wc.warm_total(),
                    wc.cold_total()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("BOXINV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut chain = Vec::new();
            let mut src = e.source();
            while let Some(s) = src {
                chain.push(s.to_string());
                src = s.source();
            }
            eprintln!("{}", json!({ "error": e.to_string(), "causes": chain }));
            ExitCode::FAILURE
        }
    }
}
