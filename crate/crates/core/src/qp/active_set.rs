use std::collections::HashSet;

use super::kkt::{multipliers, solve_status, View};
use super::pair::{status_hash, Status};
use super::{ActivePair, BoxQP, KktPoint, QpError, Result};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// On a singular reduced system, raise the proximal shift to
    /// `1e-8 · trace(Q)/n` and restart once.
    pub auto_shift: bool,
    /// Outer iterations allowed per (sub)problem level, as a multiple of n.
    pub max_outer_per_dim: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            auto_shift: true,
            max_outer_per_dim: 50,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub outer_iterations: usize,
    pub kkt_solves: usize,
    /// Dimension of every reduced system solved, in order.
    pub reduced_sizes: Vec<usize>,
    pub case2: usize,
    pub case3: usize,
    /// Objective after feasibilization of the start and after each accepted
    /// top-level step.
    pub objectives: Vec<f64>,
    pub final_objective: f64,
    /// Number of times a status vector was revisited within one level.
    pub recurrences: usize,
    /// Sub-solves that returned without decrease while a multiplier was
    /// still below the dual tolerance; the solve ends at the last point.
    pub stalls: usize,
    /// Proximal shift in effect at the end of the solve.
    pub shift: f64,
}

impl SolveReport {
    pub fn mean_reduced_size(&self) -> f64 {
        if self.reduced_sizes.is_empty() {
            0.0
        } else {
            self.reduced_sizes.iter().sum::<usize>() as f64 / self.reduced_sizes.len() as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub point: KktPoint,
    pub pair: ActivePair,
    pub report: SolveReport,
}

struct Solver<'a> {
    qp: &'a BoxQP,
    report: SolveReport,
    dual_tol: f64,
    cap: usize,
}

struct State {
    st: Vec<Status>,
    x: Vec<f64>,
    g: Vec<f64>,
}

impl State {
    /// J(x) = ½xᵀ(g + q) since g = Qx + q.
    fn objective(&self, q: &[f64]) -> f64 {
        0.5 * self.x.iter().zip(&self.g).zip(q).map(|((x, g), q)| x * (g + q)).sum::<f64>()
    }
}

impl<'a> Solver<'a> {
    fn kkt(&mut self, view: &View, st: &[Status]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.report.kkt_solves += 1;
        self.report
            .reduced_sizes
            .push(st.iter().filter(|s| **s == Status::Free).count());
        solve_status(self.qp, view, st)
    }

    /// Grows the active sets until the KKT point is feasible.
    fn feasibilize(&mut self, view: &View, mut st: Vec<Status>) -> Result<State> {
        loop {
            let (x, g) = self.kkt(view, &st)?;
            let mut added = false;
            for i in 0..st.len() {
                if st[i] != Status::Free {
                    continue;
                }
                if x[i] >= view.upper[i] {
                    st[i] = Status::Upper;
                    added = true;
                } else if x[i] <= view.lower[i] {
                    st[i] = Status::Lower;
                    added = true;
                }
            }
            if !added {
                return Ok(State { st, x, g });
            }
        }
    }

    /// J(y) − J(x) and a rounding threshold for it.
    fn decrease(&self, x: &State, y: &State) -> (f64, f64) {
        let mut dj = 0.0;
        let mut scale = 0.0;
        for i in 0..x.x.len() {
            let d = y.x[i] - x.x[i];
            dj += d * (x.g[i] + y.g[i]);
            scale += d.abs() * (x.g[i].abs() + y.g[i].abs());
        }
        (0.5 * dj, 1e-12 * 0.5 * scale)
    }

    /// Active-set iteration on the subproblem `view`, started from a status
    /// vector that is repaired first if infeasible.
    fn solve_view(&mut self, view: &View, start: Vec<Status>, top: bool) -> Result<State> {
        let q = self.qp.q();
        let mut cur = self.feasibilize(view, start)?;
        if top {
            self.report.objectives.push(cur.objective(q));
        }
        let mut seen = HashSet::new();
        seen.insert(status_hash(&cur.st));
        for _ in 0..self.cap {
            self.report.outer_iterations += 1;
            let (alpha, gamma) = multipliers(&cur.st, &cur.g);
            let mut active = Vec::new();
            let mut worst: Option<(usize, f64)> = None;
            for i in 0..cur.st.len() {
                if view.frozen[i] {
                    continue;
                }
                let m = match cur.st[i] {
                    Status::Upper => alpha[i],
                    Status::Lower => gamma[i],
                    Status::Free => continue,
                };
                active.push(i);
                if worst.map_or(true, |(_, w)| m < w) {
                    worst = Some((i, m));
                }
            }
            let Some((jstar, wmult)) = worst else {
                return Ok(cur);
            };
            if wmult >= -self.dual_tol {
                return Ok(cur);
            }

            let mut st_s = cur.st.clone();
            for &i in &active {
                let m = if cur.st[i] == Status::Upper { alpha[i] } else { gamma[i] };
                if m < 0.0 {
                    st_s[i] = Status::Free;
                }
            }
            let y = self.feasibilize(view, st_s)?;
            let (dj, thresh) = self.decrease(&cur, &y);

            let mut done = false;
            let next = if dj < -thresh {
                y
            } else if active.len() == 1 {
                self.report.case2 += 1;
                let j = active[0];
                let mut relaxed = view.clone();
                if cur.st[j] == Status::Upper {
                    relaxed.upper[j] = f64::INFINITY;
                } else {
                    relaxed.lower[j] = f64::NEG_INFINITY;
                }
                let mut st2 = cur.st.clone();
                st2[j] = Status::Free;
                let z = self.solve_view(&relaxed, st2, false)?;
                if view.lower[j] <= z.x[j] && z.x[j] <= view.upper[j] {
                    // optimal for the relaxed problem, hence for this one
                    done = true;
                    z
                } else {
                    self.feasibilize(view, z.st)?
                }
            } else {
                self.report.case3 += 1;
                let mut sub = view.clone();
                for &i in &active {
                    if i != jstar {
                        sub.frozen[i] = true;
                    }
                }
                self.solve_view(&sub, cur.st.clone(), false)?
            };
            // Sub-solves stop within the dual tolerance, so near the optimum
            // they can come back no better than cur. Nothing smaller is
            // resolvable; stop here.
            let (dj, thresh) = self.decrease(&cur, &next);
            if !(dj < -thresh) {
                self.report.stalls += 1;
                return Ok(cur);
            }
            cur = next;
            if top {
                self.report.objectives.push(cur.objective(q));
            }
            if done {
                return Ok(cur);
            }
            if !seen.insert(status_hash(&cur.st)) {
                self.report.recurrences += 1;
            }
        }
        Err(QpError::IterationLimit { limit: self.cap })
    }
}

fn run(qp: &BoxQP, start: &ActivePair, opts: &SolveOptions) -> Result<QpSolution> {
    let st0 = start.to_status(qp)?;
    let mut solver = Solver {
        qp,
        report: SolveReport::default(),
        dual_tol: qp.dual_tolerance(),
        cap: opts.max_outer_per_dim * qp.n().max(1),
    };
    let fin = solver.solve_view(&View::of(qp), st0, true)?;
    let (alpha, gamma) = multipliers(&fin.st, &fin.g);
    let mut report = solver.report;
    report.final_objective = fin.objective(qp.q());
    report.shift = qp.shift();
    Ok(QpSolution {
        pair: ActivePair::from_status(&fin.st),
        point: KktPoint { x: fin.x, alpha, gamma },
        report,
    })
}

/// Feasible active-set method with default options.
pub fn feasible_active_set(qp: &BoxQP, start: &ActivePair) -> Result<QpSolution> {
    feasible_active_set_with(qp, start, &SolveOptions::default())
}

pub fn feasible_active_set_with(qp: &BoxQP, start: &ActivePair, opts: &SolveOptions) -> Result<QpSolution> {
    match run(qp, start, opts) {
        Err(e @ QpError::SingularReducedSystem(_)) if opts.auto_shift => {
            let n = qp.n().max(1) as f64;
            let raised = 1e-8 * (qp.hessian().trace()? / n).abs();
            if raised <= qp.shift() {
                return Err(e);
            }
            let shifted = qp.clone().with_absolute_shift(raised);
            run(&shifted, start, opts)
        }
        other => other,
    }
}

/// Feasibilization from an arbitrary valid pair. Returns the feasible pair, its KKT
/// point, and the number of KKT solves.
pub fn make_primal_feasible(qp: &BoxQP, pair: &ActivePair) -> Result<(ActivePair, KktPoint, usize)> {
    let st0 = pair.to_status(qp)?;
    let mut solver = Solver {
        qp,
        report: SolveReport::default(),
        dual_tol: qp.dual_tolerance(),
        cap: 0,
    };
    let s = solver.feasibilize(&View::of(qp), st0)?;
    let (alpha, gamma) = multipliers(&s.st, &s.g);
    Ok((
        ActivePair::from_status(&s.st),
        KktPoint { x: s.x, alpha, gamma },
        solver.report.kkt_solves,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::qp::testutil::random_box_qp;
    use crate::qp::{enumerate_oracle, is_optimal, is_primal_feasible};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_d(q: f64) -> BoxQP {
        BoxQP::dense(DenseMatrix::from_diagonal(&[2.0]), vec![q], vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn one_d_bound_active() {
        let qp = one_d(-6.0);
        let s = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
        assert_eq!(s.point.x, vec![1.0]);
        assert_eq!(s.point.alpha, vec![4.0]);
        assert_eq!(s.pair, ActivePair::new(vec![0], vec![]));
    }

    #[test]
    fn one_d_interior() {
        let qp = one_d(-1.0);
        let s = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
        assert_eq!(s.point.x, vec![0.5]);
        assert!(s.pair.is_empty());
    }

    #[test]
    fn feasibilization_example() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![-3.0, -3.0], vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let (pair, p, solves) = make_primal_feasible(&qp, &ActivePair::empty()).unwrap();
        assert_eq!(pair, ActivePair::new(vec![0, 1], vec![]));
        assert_eq!(p.x, vec![1.0, 1.0]);
        assert_eq!(solves, 2);
    }

    #[test]
    fn feasible_start_is_unchanged() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![-0.5, 0.2], vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let start = ActivePair::new(vec![], vec![1]);
        let (pair, _, solves) = make_primal_feasible(&qp, &start).unwrap();
        assert_eq!(pair, start);
        assert_eq!(solves, 1);
    }

    #[test]
    fn feasibilization_terminates_within_n_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let qp = random_box_qp(10, 1e3, &mut rng);
            let mut up = Vec::new();
            let mut lo = Vec::new();
            for i in 0..10 {
                let r: f64 = rng.gen();
                if r < 0.2 && qp.upper()[i].is_finite() {
                    up.push(i);
                } else if r < 0.4 && qp.lower()[i].is_finite() {
                    lo.push(i);
                }
            }
            let start = ActivePair::new(up, lo);
            let (pair, p, solves) = make_primal_feasible(&qp, &start).unwrap();
            assert!(solves <= 11, "{solves} solves");
            assert!(pair.contains(&start));
            assert!(is_primal_feasible(&qp, &p.x, 0.0));
        }
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for k in 0..60 {
            let n = 5 + k % 4;
            let qp = random_box_qp(n, 1e4, &mut rng);
            let s = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
            let o = enumerate_oracle(&qp).unwrap();
            assert!(is_optimal(&qp, &s.point, qp.dual_tolerance()));
            for (a, b) in s.point.x.iter().zip(&o.x) {
                assert!((a - b).abs() <= 1e-8, "instance {k}");
            }
            for w in s.report.objectives.windows(2) {
                assert!(w[1] < w[0]);
            }
            assert!(s.report.kkt_solves >= s.report.outer_iterations);
        }
    }

    #[test]
    fn active_indices_sit_exactly_on_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let qp = random_box_qp(40, 1e3, &mut rng);
        let s = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
        for &i in &s.pair.upper {
            assert_eq!(s.point.x[i].to_bits(), qp.upper()[i].to_bits());
        }
        for &i in &s.pair.lower {
            assert_eq!(s.point.x[i].to_bits(), qp.lower()[i].to_bits());
        }
        assert_eq!(s.report.recurrences, 0);
    }

    #[test]
    fn warm_start_from_solution_takes_one_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let qp = random_box_qp(30, 1e2, &mut rng);
        let cold = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
        let warm = feasible_active_set(&qp, &cold.pair).unwrap();
        assert_eq!(warm.report.outer_iterations, 1);
        assert_eq!(warm.report.kkt_solves, 1);
        assert_eq!(warm.point.x, cold.point.x);
    }
}
