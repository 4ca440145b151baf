use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::fem2d::{io::write_field, StructuredMesh};
use crate::gn::{
    gauss_newton_solve, GnConfig, GnIterate, GnReport, GnSolver, InverseProblem, ProblemKind, QpMode, StartMode,
};

use super::{add_noise, compute_metrics, synthesize_data, BenchError, Metrics, Result, Truth};

/// Noise levels of the sweep.
pub const SWEEP_DELTAS: [f64; 3] = [0.001, 0.01, 0.1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    /// 1e-4·δ for the diffusion problem, 0 otherwise.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    pub test_id: u8,
    pub n: usize,
    pub delta: f64,
    pub tau: f64,
    pub alpha: AlphaRule,
    pub seed: u64,
    /// Number of seeds, `seed..seed + runs`.
    pub runs: usize,
    pub start_mode: StartMode,
    pub solver: GnSolver,
    pub qp_mode: QpMode,
    pub max_k: usize,
    pub cost_tol: f64,
    /// Artifact directory; nothing is written when unset.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Source,
            test_id: 1,
            n: 32,
            delta: 0.001,
            tau: 1.1,
            alpha: AlphaRule::Auto,
            seed: 0,
            runs: 1,
            start_mode: StartMode::Warm,
            solver: GnSolver::FeasibleAs,
            qp_mode: QpMode::Factored,
            max_k: 20,
            cost_tol: 1e-8,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.test_id != 1 && !(self.kind == ProblemKind::Potential && matches!(self.test_id, 2 | 3)) {
            return Err(BenchError::InvalidTest {
                test_id: self.test_id,
                kind: self.kind,
            });
        }
        if self.n < 2 {
            return Err(BenchError::InvalidConfig(format!("N = {} is below 2", self.n)));
        }
        if !(self.delta >= 0.0) || !(self.tau > 1.0) || self.runs == 0 {
            return Err(BenchError::InvalidConfig(format!(
                "need delta >= 0, tau > 1, runs >= 1 (got {}, {}, {})",
                self.delta, self.tau, self.runs
            )));
        }
        if let AlphaRule::Fixed(a) = self.alpha {
            if !(a >= 0.0) {
                return Err(BenchError::InvalidConfig(format!("alpha = {a}")));
            }
        }
        Ok(())
    }

    pub fn alpha_value(&self) -> f64 {
        match self.alpha {
            AlphaRule::Fixed(a) => a,
            AlphaRule::Auto if self.kind == ProblemKind::Diffusion => 1e-4 * self.delta,
            AlphaRule::Auto => 0.0,
        }
    }

    fn gn_config(&self) -> GnConfig {
        GnConfig {
            max_k: self.max_k,
            cost_tol: self.cost_tol,
            start_mode: self.start_mode,
            qp_mode: self.qp_mode,
            solver: self.solver,
            ..GnConfig::default()
        }
    }

    fn run_dir(&self, out: &Path) -> PathBuf {
        let start = match self.start_mode {
            StartMode::Warm => "warm",
            StartMode::Cold => "cold",
        };
        out.join(format!(
            "{}_test{}_N{}_delta{}_seed{}_{start}",
            self.kind, self.test_id, self.n, self.delta, self.seed
        ))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    pub metrics: Metrics,
    pub iterate: GnIterate,
    pub report: GnReport,
    pub truth: Truth,
}

/// Truth → data → noise → Gauss-Newton → metrics for `config.seed`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mesh = StructuredMesh::new(config.n);
    let data = synthesize_data(config.kind, config.test_id, &mesh)?;
    let y_delta = add_noise(&data.y, config.delta, config.seed);
    let np = config.kind.param_kind().len(&mesh);
    let problem = InverseProblem::new(
        config.kind,
        mesh.clone(),
        vec![y_delta],
        vec![data.g],
        config.delta,
        config.tau,
        vec![data.truth.lower; np],
        vec![data.truth.upper; np],
        config.alpha_value(),
    )?;
    let clock = Instant::now();
    let (iterate, report) = gauss_newton_solve(&problem, problem.initial_iterate(), &config.gn_config())?;
    let wall = clock.elapsed().as_secs_f64();
    check_feasible(&problem, &iterate)?;
    let metrics = compute_metrics(&mesh, config.kind.param_kind(), &iterate.param, &data.truth.param, &report, wall)?;
    let outcome = RunOutcome {
        seed: config.seed,
        metrics,
        iterate,
        report,
        truth: data.truth,
    };
    if let Some(out) = &config.out {
        write_artifacts(&config.run_dir(out), config, &outcome)?;
    }
    Ok(outcome)
}

fn check_feasible(problem: &InverseProblem, it: &GnIterate) -> Result<()> {
    let bad_param = (0..it.param.len()).find(|&i| !(problem.lower()[i] <= it.param[i] && it.param[i] <= problem.upper()[i]));
    let hw = problem.corridor_half_width();
    let y = &problem.observations()[0];
    let bad_state = problem
        .mesh()
        .free_nodes()
        .iter()
        .find(|&&v| !((y[v] - hw) <= it.states[0][v] && it.states[0][v] <= y[v] + hw));
    match (bad_param, bad_state) {
        (None, None) => Ok(()),
        (p, s) => Err(BenchError::InvalidConfig(format!(
            "reconstruction left its bounds (parameter {p:?}, state node {s:?})"
        ))),
    }
}

fn write_artifacts(dir: &Path, config: &ExperimentConfig, outcome: &RunOutcome) -> Result<()> {
    let io = |path: &Path, e: std::io::Error| BenchError::Output {
        path: path.to_path_buf(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let kind = config.kind.param_kind();
    write_field(dir.join("param.txt"), kind, config.n, &outcome.iterate.param)?;
    write_field(dir.join("truth.txt"), kind, config.n, &outcome.truth.param)?;
    write_field(
        dir.join("state.txt"),
        crate::fem2d::FieldKind::P1,
        config.n,
        &outcome.iterate.states[0],
    )?;
    let np = outcome.truth.param.len();
    for k in 0..outcome.report.iterations {
        let status: Vec<f64> = outcome.report.status(k, 0..np).into_iter().map(f64::from).collect();
        write_field(dir.join(format!("active_{}.txt", k + 1)), kind, config.n, &status)?;
    }
    let path = dir.join("metrics.json");
    let json = serde_json::to_string_pretty(&RunRecord::new(config, outcome))?;
    std::fs::write(&path, json).map_err(|e| io(&path, e))?;
    Ok(())
}

#[derive(Serialize)]
struct RunRecord<'a> {
    problem: &'a str,
    test: u8,
    n: usize,
    delta: f64,
    tau: f64,
    alpha: f64,
    seed: u64,
    start: &'a str,
    stop: &'a str,
    qp_dim: usize,
    qp_dim_with_dirichlet: usize,
    costs: &'a [f64],
    kkt_solves: Vec<usize>,
    metrics: &'a Metrics,
}

impl<'a> RunRecord<'a> {
    fn new(config: &'a ExperimentConfig, o: &'a RunOutcome) -> Self {
        Self {
            problem: config.kind.name(),
            test: config.test_id,
            n: config.n,
            delta: config.delta,
            tau: config.tau,
            alpha: config.alpha_value(),
            seed: o.seed,
            start: match config.start_mode {
                StartMode::Warm => "warm",
                StartMode::Cold => "cold",
            },
            stop: o.report.stop.name(),
            qp_dim: o.report.qp_dim,
            qp_dim_with_dirichlet: o.report.qp_dim_with_dirichlet,
            costs: &o.report.costs,
            kkt_solves: o.report.qp_reports.iter().map(|r| r.kkt_solves).collect(),
            metrics: &o.metrics,
        }
    }
}

/// Runs seeds `seed..seed + runs` in parallel.
pub fn run_batch(config: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    (0..config.runs as u64)
        .into_par_iter()
        .map(|r| {
            let seed = config.seed + r;
            let cfg = ExperimentConfig { seed, ..config.clone() };
            run_experiment(&cfg).map_err(|e| BenchError::Run {
                seed,
                source: Box::new(e),
            })
        })
        .collect()
}

/// All three problems with test 1 at the template's N and δ.
pub fn run_all_problems(template: &ExperimentConfig) -> Result<Vec<(ProblemKind, RunOutcome)>> {
    ProblemKind::ALL
        .par_iter()
        .map(|&kind| {
            let cfg = ExperimentConfig {
                kind,
                test_id: 1,
                ..template.clone()
            };
            run_experiment(&cfg).map(|o| (kind, o))
        })
        .collect()
}

fn metric_rows() -> [(&'static str, fn(&Metrics) -> String); 9] {
    [
        ("err_spot1", |m| m.err_spot1.to_string()),
        ("err_spot2", |m| m.err_spot2.to_string()),
        ("err_spot3", |m| m.err_spot3.to_string()),
        ("err_L1", |m| m.err_l1.to_string()),
        ("rel_residual", |m| m.rel_residual.to_string()),
        ("k", |m| m.k.to_string()),
        ("wall_time_s", |m| format!("{:.3}", m.wall_time)),
        ("kkt_solves", |m| m.total_kkt_solves.to_string()),
        ("avg_system_size", |m| format!("{:.1}", m.avg_system_size)),
    ]
}

fn wide_csv(columns: &[String], metrics: &[&Metrics]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["metric".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for (name, f) in metric_rows() {
        let mut rec = vec![name.to_string()];
        rec.extend(metrics.iter().map(|m| f(m)));
        w.write_record(&rec)?;
    }
    finish(w)
}

/// One column per problem, one row per metric.
pub fn problems_csv(rows: &[(ProblemKind, RunOutcome)]) -> Result<String> {
    let cols: Vec<String> = rows.iter().map(|(k, _)| k.to_string()).collect();
    let ms: Vec<&Metrics> = rows.iter().map(|(_, o)| &o.metrics).collect();
    wide_csv(&cols, &ms)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub kind: ProblemKind,
    pub delta: f64,
    pub mean: Metrics,
    pub runs: Vec<Metrics>,
}

/// Mean metrics over `runs` seeds for every problem and noise level.
pub fn run_delta_sweep(template: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    template.validate()?;
    let jobs: Vec<(ProblemKind, f64, u64)> = ProblemKind::ALL
        .iter()
        .flat_map(|&k| SWEEP_DELTAS.iter().flat_map(move |&d| (0..template.runs as u64).map(move |r| (k, d, r))))
        .collect();
    let results: Vec<Metrics> = jobs
        .par_iter()
        .map(|&(kind, delta, r)| {
            let seed = template.seed + r;
            let cfg = ExperimentConfig {
                kind,
                test_id: 1,
                delta,
                seed,
                ..template.clone()
            };
            run_experiment(&cfg).map(|o| o.metrics).map_err(|e| BenchError::Run {
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(results
        .chunks(template.runs)
        .zip(jobs.chunks(template.runs))
        .map(|(ms, js)| SweepRow {
            kind: js[0].0,
            delta: js[0].1,
            mean: Metrics::mean(ms),
            runs: ms.to_vec(),
        })
        .collect())
}

/// One column per (problem, δ), averaged over the seeds.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let cols: Vec<String> = rows.iter().map(|r| format!("{}_{}", r.kind, r.delta)).collect();
    let ms: Vec<&Metrics> = rows.iter().map(|r| &r.mean).collect();
    wide_csv(&cols, &ms)
}

/// Per-iteration KKT solves and mean reduced-system size for both start
/// modes on the same data.
#[derive(Debug, Clone)]
pub struct WarmCold {
    pub warm: RunOutcome,
    pub cold: RunOutcome,
}

impl WarmCold {
    pub fn series(o: &RunOutcome) -> Vec<(usize, f64)> {
        o.report
            .qp_reports
            .iter()
            .map(|r| (r.kkt_solves, r.mean_reduced_size()))
            .collect()
    }

    pub fn warm_total(&self) -> usize {
        self.warm.report.total_kkt_solves()
    }

    pub fn cold_total(&self) -> usize {
        self.cold.report.total_kkt_solves()
    }
}

pub fn run_warmcold(config: &ExperimentConfig) -> Result<WarmCold> {
    if config.kind != ProblemKind::Potential {
        return Err(BenchError::InvalidConfig(format!(
            "warm/cold comparison runs on the potential problem, not {}",
            config.kind
        )));
    }
    let (warm, cold) = rayon::join(
        || {
            run_experiment(&ExperimentConfig {
                start_mode: StartMode::Warm,
                ..config.clone()
            })
        },
        || {
            run_experiment(&ExperimentConfig {
                start_mode: StartMode::Cold,
                ..config.clone()
            })
        },
    );
    Ok(WarmCold { warm: warm?, cold: cold? })
}

pub fn warmcold_csv(wc: &WarmCold) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "warm_kkt_solves", "warm_avg_size", "cold_kkt_solves", "cold_avg_size"])?;
    let (ws, cs) = (WarmCold::series(&wc.warm), WarmCold::series(&wc.cold));
    for k in 0..ws.len().max(cs.len()) {
        let cell = |s: &[(usize, f64)], i: usize| match s.get(i) {
            Some(&(n, a)) => (n.to_string(), format!("{a:.1}")),
            None => (String::new(), String::new()),
        };
        let (wn, wa) = cell(&ws, k);
        let (cn, ca) = cell(&cs, k);
        w.write_record([(k + 1).to_string(), wn, wa, cn, ca])?;
    }
    w.write_record([
        "total".to_string(),
        wc.warm_total().to_string(),
        String::new(),
        wc.cold_total().to_string(),
        String::new(),
    ])?;
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
