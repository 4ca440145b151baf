//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. The reconstruction bands run at N = 32 and take
//! several minutes on one core.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use boxinv::bench::{
    add_noise, run_batch, run_experiment, synthesize_data, ExperimentConfig, Metrics, RunOutcome, SPOTS,
};
use boxinv::fem2d::{
    assemble_mass_p1, assemble_stiffness, reduced_stiffness_factor, restrict_matrix_to_free, square_mean,
    vstar_norm_sq, FieldKind, StructuredMesh,
};
use boxinv::gn::{assemble_gn_qp, InverseProblem, ProblemKind, QpMode, StartMode};
use boxinv::linalg::{axpy, dot, norm_inf};
use boxinv::qp::{certify, enumerate_oracle, feasible_active_set, ActivePair, BoxQP, QpSolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// The random QP suite: 200 instances, n in 5..=12, condition up to 1e6.
fn qp_suite() -> Vec<BoxQP> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|k| {
            let n = 5 + k % 8;
            // every tenth instance sits at the top of the range
            let cond = if k % 10 == 9 { 1e6 } else { common::log_uniform_cond(1e6, &mut rng) };
            common::random_qp(n, cond, &mut rng)
        })
        .collect()
}

fn solve_suite(suite: &[BoxQP]) -> Vec<QpSolution> {
    suite
        .iter()
        .map(|qp| feasible_active_set(qp, &ActivePair::all_lower(qp)).expect("suite solve"))
        .collect()
}

fn oracle_equivalence(suite: &[BoxQP]) -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for qp in suite {
        let sol = feasible_active_set(qp, &ActivePair::all_lower(qp));
        let oracle = enumerate_oracle(qp);
        match (sol, oracle) {
            (Ok(s), Ok(o)) => {
                let d = s.point.x.iter().zip(&o.x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst = worst.max(d);
            }
            _ => failures += 1,
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        failures == 0 && worst <= 1e-8 && secs < 60.0,
        format!("{} instances, max |dx| = {worst:.2e}, {failures} errors, {secs:.2} s", suite.len()),
    )
}

fn kkt_certificates(suite: &[BoxQP], sols: &[QpSolution]) -> Outcome {
    let mut bad = 0;
    let (mut st, mut pv, mut dv, mut cp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (qp, s) in suite.iter().zip(sols) {
        let c = certify(qp, &s.point).expect("certificate");
        let qn = norm_inf(qp.q());
        let ok = c.stationarity <= 1e-9 * (1.0 + qn)
            && c.complementarity == 0.0
            && c.primal_violation <= 1e-12
            && c.dual_violation <= 1e-9;
        if !ok {
            bad += 1;
        }
        st = st.max(c.stationarity / (1.0 + qn));
        pv = pv.max(c.primal_violation);
        dv = dv.max(c.dual_violation);
        cp = cp.max(c.complementarity);
    }
    outcome(
        bad == 0,
        format!(
            "{} solves, {bad} rejected; worst scaled stationarity {st:.1e}, primal {pv:.1e}, dual {dv:.1e}, complementarity {cp:.1e}",
            sols.len()
        ),
    )
}

fn descent_no_cycling(sols: &[QpSolution]) -> Outcome {
    let mut non_decreasing = 0;
    let mut recurrences = 0;
    let mut steps = 0;
    for s in sols {
        steps += s.report.objectives.len().saturating_sub(1);
        non_decreasing += s.report.objectives.windows(2).filter(|w| !(w[1] < w[0])).count();
        recurrences += s.report.recurrences;
    }
    outcome(
        non_decreasing == 0 && recurrences == 0,
        format!("{steps} accepted steps, {non_decreasing} without strict decrease, {recurrences} recurring pairs"),
    )
}

fn fem_patch_tests() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut kernel, mut energy, mut mass, mut vstar) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in [2, 5, 16, 32] {
        let mesh = StructuredMesh::new(n);
        let a: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(0.5..12.0)).collect();
        let k = assemble_stiffness(&mesh, &a).unwrap();
        kernel = kernel.max(norm_inf(&k.mul_vec(&vec![1.0; mesh.num_nodes()]).unwrap()));
        let k1 = assemble_stiffness(&mesh, &vec![1.0; mesh.num_cells()]).unwrap();
        let x: Vec<f64> = (0..mesh.num_nodes()).map(|v| mesh.node_coords(v)[0]).collect();
        energy = energy.max((dot(&x, &k1.mul_vec(&x).unwrap()) - 4.0).abs());
        let ones = vec![1.0; mesh.num_nodes()];
        mass = mass.max((dot(&ones, &assemble_mass_p1(&mesh).mul_vec(&ones).unwrap()) - 4.0).abs());
        let kf = restrict_matrix_to_free(&mesh, &k1).unwrap();
        let f = reduced_stiffness_factor(&mesh).unwrap();
        let v: Vec<f64> = (0..mesh.num_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = kf.mul_vec(&v).unwrap();
        let e = dot(&v, &r);
        vstar = vstar.max((vstar_norm_sq(&r, &f).unwrap() - e).abs() / e);
    }
    outcome(
        kernel <= 1e-12 && energy <= 1e-12 && mass <= 1e-12 && vstar <= 1e-10,
        format!("|K1| {kernel:.1e}, energy(x) - 4 {energy:.1e}, mass - 4 {mass:.1e}, V* rel {vstar:.1e}"),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for kind in ProblemKind::ALL {
        let mesh = StructuredMesh::new(4);
        let data = synthesize_data(kind, 1, &mesh).unwrap();
        let np = kind.param_kind().len(&mesh);
        let p = InverseProblem::new(
            kind,
            mesh,
            vec![add_noise(&data.y, 0.01, 0)],
            vec![data.g],
            0.01,
            1.1,
            vec![data.truth.lower; np],
            vec![data.truth.upper; np],
            0.0,
        )
        .unwrap();
        for _ in 0..5 {
            let mut it = p.initial_iterate();
            for (v, (l, u)) in it.param.iter_mut().zip(p.lower().iter().zip(p.upper())) {
                *v = rng.gen_range(*l..*u);
            }
            for &v in p.mesh().free_nodes() {
                it.states[0][v] = rng.gen_range(-1.0..1.0);
            }
            let gq = assemble_gn_qp(&p, &it, QpMode::Factored).unwrap();
            let z = gq.to_z(p.mesh(), &it).unwrap();
            let mut grad = gq.qp.hessian().apply(&z).unwrap();
            axpy(1.0, gq.qp.q(), &mut grad);
            let cost = |z: &[f64]| p.cost(&gq.to_iterate(p.mesh(), z).unwrap()).unwrap();
            let scale = norm_inf(&grad);
            for i in 0..z.len() {
                let h = 1e-5 * (1.0 + z[i].abs());
                let (mut zp, mut zm) = (z.clone(), z.clone());
                zp[i] += h;
                zm[i] -= h;
                let fd = (cost(&zp) - cost(&zm)) / (2.0 * h);
                worst = worst.max((fd - grad[i]).abs() / scale);
            }
        }
    }
    outcome(worst <= 1e-6, format!("max |fd - grad| / |grad|_inf = {worst:.2e} over 15 points"))
}

fn config(kind: ProblemKind, delta: f64) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        n: 32,
        delta,
        runs: 5,
        ..ExperimentConfig::default()
    }
}

fn batch(kind: ProblemKind, delta: f64) -> Result<Vec<RunOutcome>, String> {
    let t = Instant::now();
    let out = run_batch(&config(kind, delta)).map_err(|e| e.to_string());
    eprintln!("  ({kind}, delta {delta}: {:.0} s)", t.elapsed().as_secs_f64());
    out
}

fn metrics(runs: &[RunOutcome]) -> Vec<&Metrics> {
    runs.iter().map(|o| &o.metrics).collect()
}

fn source_band(runs: &[RunOutcome]) -> Outcome {
    let m = metrics(runs);
    let k_one = m.iter().all(|m| m.k == 1);
    let spots = m.iter().filter(|m| m.err_spot1 == 0.0 && m.err_spot2 == 0.0).count();
    let rr = median(m.iter().map(|m| m.rel_residual).collect());
    let l1 = median(m.iter().map(|m| m.err_l1).collect());
    let slowest = m.iter().map(|m| m.wall_time).fold(0.0, f64::max);
    outcome(
        k_one && spots >= 4 && rr <= 1e-4 && l1 <= 0.15 && slowest < 120.0,
        format!(
            "k = {:?}, spots 1-2 exact on {spots}/5, median J_k/J_0 {rr:.2e}, median L1 {l1:.4}, slowest seed {slowest:.1} s",
            m.iter().map(|m| m.k).collect::<Vec<_>>()
        ),
    )
}

fn potential_band(runs: &[RunOutcome]) -> Outcome {
    let m = metrics(runs);
    let spots = m.iter().filter(|m| m.err_spot1 == 0.0 && m.err_spot2 == 0.0).count();
    let kmax = m.iter().map(|m| m.k).max().unwrap_or(0);
    let l1 = median(m.iter().map(|m| m.err_l1).collect());
    outcome(
        spots >= 4 && kmax <= 15 && l1 <= 0.3,
        format!("spots 1-2 exact on {spots}/5, max k {kmax}, median L1 {l1:.4}"),
    )
}

fn diffusion_band(runs: &[RunOutcome]) -> Outcome {
    let m = metrics(runs);
    let spots = m.iter().filter(|m| m.err_spot1 == 0.0).count();
    let l1 = median(m.iter().map(|m| m.err_l1).collect());
    outcome(
        spots >= 4 && l1 <= 1.0,
        format!(
            "spot 1 exact on {spots}/5, median L1 {l1:.4}, k = {:?}",
            m.iter().map(|m| m.k).collect::<Vec<_>>()
        ),
    )
}

fn delta_trend(pairs: &[(ProblemKind, &[RunOutcome], &[RunOutcome])]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, small, large) in pairs {
        let a = mean(small.iter().map(|o| o.metrics.err_l1));
        let b = mean(large.iter().map(|o| o.metrics.err_l1));
        pass &= a < b;
        parts.push(format!("{kind} {a:.4} < {b:.4}"));
    }
    outcome(pass, parts.join(", "))
}

fn indefinite_potential() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for test_id in [2u8, 3] {
        let cfg = ExperimentConfig {
            kind: ProblemKind::Potential,
            test_id,
            n: 32,
            delta: 0.01,
            ..ExperimentConfig::default()
        };
        match run_experiment(&cfg) {
            Ok(o) => {
                let mesh = StructuredMesh::new(cfg.n);
                let inside = square_mean(&mesh, FieldKind::P0, &o.iterate.param, SPOTS[1], 1.0 / cfg.n as f64).unwrap();
                let bound = o.truth.lower;
                pass &= (inside - bound).abs() <= 2.0;
                parts.push(format!("test {test_id}: B1 spot mean {inside:.3} vs bound {bound}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("test {test_id}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn warm_cold(warm: &RunOutcome) -> Outcome {
    let cold_cfg = ExperimentConfig {
        start_mode: StartMode::Cold,
        seed: warm.seed,
        ..config(ProblemKind::Potential, 0.001)
    };
    match run_experiment(&cold_cfg) {
        Ok(cold) => {
            let (w, c) = (warm.report.total_kkt_solves(), cold.report.total_kkt_solves());
            outcome(w <= c, format!("seed {}: warm {w} KKT solves, cold {c}", warm.seed))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, o: Outcome| {
        println!("[{}] {id:2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };

    let suite = qp_suite();
    report(1, "QP oracle equivalence", oracle_equivalence(&suite));
    let sols = solve_suite(&suite);
    report(2, "KKT certification", kkt_certificates(&suite, &sols));
    report(3, "descent and no cycling", descent_no_cycling(&sols));
    report(4, "FEM patch tests", fem_patch_tests());
    report(5, "GN gradient check", gradient_check());

    let failed = |e: String| outcome(false, e);
    let source = batch(ProblemKind::Source, 0.001);
    report(6, "source band", source.as_ref().map_or_else(|e| failed(e.clone()), |r| source_band(r)));
    let potential = batch(ProblemKind::Potential, 0.001);
    report(7, "potential band", potential.as_ref().map_or_else(|e| failed(e.clone()), |r| potential_band(r)));
    let diffusion = batch(ProblemKind::Diffusion, 0.001);
    report(8, "diffusion band", diffusion.as_ref().map_or_else(|e| failed(e.clone()), |r| diffusion_band(r)));

    let source_noisy = batch(ProblemKind::Source, 0.1);
    let potential_noisy = batch(ProblemKind::Potential, 0.1);
    let trend = match (&source, &source_noisy, &potential, &potential_noisy) {
        (Ok(a), Ok(b), Ok(c), Ok(d)) => {
            delta_trend(&[(ProblemKind::Source, a, b), (ProblemKind::Potential, c, d)])
        }
        _ => failed("a run in the sweep failed".into()),
    };
    report(9, "noise-level trend", trend);
    report(10, "indefinite potential", indefinite_potential());
    report(
        11,
        "warm/cold ordering",
        potential.as_ref().map_or_else(|e| failed(e.clone()), |r| warm_cold(&r[0])),
    );

    let passed = results.iter().filter(|(_, _, o)| o.pass).count();
    println!(
        "{passed}/{} criteria passed in {:.0} s",
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
