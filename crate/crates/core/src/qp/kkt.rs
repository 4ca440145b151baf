use crate::linalg::{self, cg_solve, factorize, LinalgError};

use super::pair::Status;
use super::{ActivePair, BoxQP, Hessian, QpError, Result};

/// Solution of the KKT system for one active pair.
#[derive(Debug, Clone, PartialEq)]
pub struct KktPoint {
    pub x: Vec<f64>,
    /// Upper-bound multipliers, nonzero only on 𝒜.
    pub alpha: Vec<f64>,
    /// Lower-bound multipliers, nonzero only on 𝒞.
    pub gamma: Vec<f64>,
}

/// Residual measures of a candidate optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktCertificate {
    /// ‖Qx + q + α − γ‖∞
    pub stationarity: f64,
    /// max over i of bound violation of x
    pub primal_violation: f64,
    /// max(0, −min αᵢ, −min γᵢ)
    pub dual_violation: f64,
    /// max |αᵢ(uᵢ − xᵢ)|, |γᵢ(xᵢ − ℓᵢ)|
    pub complementarity: f64,
}

/// Bounds and frozen indices of a subproblem, sharing the Hessian of the
/// full problem.
#[derive(Debug, Clone)]
pub(crate) struct View {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Frozen indices keep their status and are not variables of the view.
    pub frozen: Vec<bool>,
}

impl View {
    pub fn of(qp: &BoxQP) -> Self {
        Self {
            lower: qp.lower().to_vec(),
            upper: qp.upper().to_vec(),
            frozen: vec![false; qp.n()],
        }
    }
}

/// KKT solve for a status vector: returns x and the gradient Qx + q.
pub(crate) fn solve_status(qp: &BoxQP, view: &View, st: &[Status]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = qp.n();
    let mut x = vec![0.0; n];
    let mut free = Vec::new();
    for i in 0..n {
        match st[i] {
            Status::Upper => x[i] = view.upper[i],
            Status::Lower => x[i] = view.lower[i],
            Status::Free => free.push(i),
        }
    }
    if !free.is_empty() {
        let g0 = qp.gradient(&x)?;
        let rhs: Vec<f64> = free.iter().map(|&i| -g0[i]).collect();
        let xi = reduced_solve(qp, &free, &rhs)?;
        for (k, &i) in free.iter().enumerate() {
            x[i] = xi[k];
        }
    }
    let g = qp.gradient(&x)?;
    Ok((x, g))
}

/// Solves (Q + σI)_II y = rhs.
pub(crate) fn reduced_solve(qp: &BoxQP, idx: &[usize], rhs: &[f64]) -> Result<Vec<f64>> {
    let sigma = qp.shift();
    match qp.hessian() {
        Hessian::Matrix(m) => {
            let mut sub = linalg::extract_principal_submatrix(m, idx)?;
            if sigma != 0.0 {
                sub = sub.shifted(sigma);
            }
            let f = factorize(&sub).map_err(QpError::SingularReducedSystem)?;
            let mut y = linalg::solve(&f, rhs)?;
            // one refinement step
            let r: Vec<f64> = sub.mul_vec(&y)?.iter().zip(rhs).map(|(a, b)| b - a).collect();
            if r.iter().any(|v| *v != 0.0) {
                linalg::axpy(1.0, &linalg::solve(&f, &r)?, &mut y);
            }
            Ok(y)
        }
        Hessian::Factored(f) => f.solve_reduced(idx, sigma, rhs),
        Hessian::Operator(op) => {
            let n = op.dim();
            let op = op.clone();
            let idx_owned = idx.to_vec();
            let restricted = linalg::LinearOperator::new(idx.len(), move |v| {
                let mut full = vec![0.0; n];
                for (k, &i) in idx_owned.iter().enumerate() {
                    full[i] = v[k];
                }
                let y = op.apply(&full).expect("dimension fixed at construction");
                idx_owned
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| y[i] + sigma * v[k])
                    .collect()
            });
            let maxit = 20 * idx.len() + 100;
            match cg_solve(&restricted, rhs, 1e-11, maxit) {
                Ok(sol) => Ok(sol.x),
                Err(e @ LinalgError::NotPositiveDefinite { .. }) => Err(QpError::SingularReducedSystem(e)),
                Err(e) => Err(e.into()),
            }
        }
    }
}

pub(crate) fn multipliers(st: &[Status], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = st.len();
    let mut alpha = vec![0.0; n];
    let mut gamma = vec![0.0; n];
    for i in 0..n {
        match st[i] {
            Status::Upper => alpha[i] = -g[i],
            Status::Lower => gamma[i] = g[i],
            Status::Free => {}
        }
    }
    (alpha, gamma)
}

/// Solves KKT(𝒜, 𝒞): fixes x on the active sets, solves the inactive block,
/// and reads the multipliers off stationarity.
pub fn kkt_solve(qp: &BoxQP, pair: &ActivePair) -> Result<KktPoint> {
    let st = pair.to_status(qp)?;
    let (x, g) = solve_status(qp, &View::of(qp), &st)?;
    let (alpha, gamma) = multipliers(&st, &g);
    Ok(KktPoint { x, alpha, gamma })
}

pub fn is_primal_feasible(qp: &BoxQP, x: &[f64], tol: f64) -> bool {
    x.len() == qp.n()
        && x
            .iter()
            .zip(qp.lower().iter().zip(qp.upper()))
            .all(|(&xi, (&l, &u))| l - tol <= xi && xi <= u + tol)
}

/// Primal feasibility (at the problem's own tolerance) and dual feasibility at `tol`.
pub fn is_optimal(qp: &BoxQP, point: &KktPoint, tol: f64) -> bool {
    is_primal_feasible(qp, &point.x, qp.primal_tolerance())
        && point.alpha.iter().all(|&a| a >= -tol)
        && point.gamma.iter().all(|&g| g >= -tol)
}

pub fn certify(qp: &BoxQP, point: &KktPoint) -> Result<KktCertificate> {
    let n = qp.n();
    for len in [point.x.len(), point.alpha.len(), point.gamma.len()] {
        if len != n {
            return Err(QpError::DimensionMismatch { expected: n, got: len });
        }
    }
    let g = qp.gradient(&point.x)?;
    let mut c = KktCertificate {
        stationarity: 0.0,
        primal_violation: 0.0,
        dual_violation: 0.0,
        complementarity: 0.0,
    };
    for i in 0..n {
        let (x, a, gm) = (point.x[i], point.alpha[i], point.gamma[i]);
        let (l, u) = (qp.lower()[i], qp.upper()[i]);
        c.stationarity = c.stationarity.max((g[i] + a - gm).abs());
        c.primal_violation = c.primal_violation.max(l - x).max(x - u);
        c.dual_violation = c.dual_violation.max(0.0 - a).max(0.0 - gm);
        if a != 0.0 {
            c.complementarity = c.complementarity.max((a * (u - x)).abs());
        }
        if gm != 0.0 {
            c.complementarity = c.complementarity.max((gm * (x - l)).abs());
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, LinearOperator, SymMatrix};
    use crate::qp::testutil::random_spd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unconstrained_stationary_point() {
        let qp = BoxQP::dense(
            DenseMatrix::from_diagonal(&[2.0, 2.0]),
            vec![-2.0, 2.0],
            vec![-1.0; 2],
            vec![1.0; 2],
        )
        .unwrap();
        let p = kkt_solve(&qp, &ActivePair::empty()).unwrap();
        assert_eq!(p.x, vec![1.0, -1.0]);
        assert_eq!(p.alpha, vec![0.0; 2]);
        assert_eq!(p.gamma, vec![0.0; 2]);
    }

    #[test]
    fn upper_multiplier_by_hand() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![-3.0, 0.0], vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let p = kkt_solve(&qp, &ActivePair::new(vec![0], vec![])).unwrap();
        assert_eq!(p.x, vec![1.0, 0.0]);
        assert_eq!(p.alpha, vec![2.0, 0.0]);
        assert_eq!(p.gamma, vec![0.0, 0.0]);
    }

    #[test]
    fn random_pairs_satisfy_stationarity_and_complementarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = 8;
            let q_mat = random_spd(n, 1e3, &mut rng);
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let qp = BoxQP::dense(q_mat, q, vec![-1.0; n], vec![1.0; n]).unwrap();
            let mut up = Vec::new();
            let mut lo = Vec::new();
            for i in 0..n {
                match rng.gen_range(0..3) {
                    0 => up.push(i),
                    1 => lo.push(i),
                    _ => {}
                }
            }
            let pair = ActivePair::new(up.clone(), lo.clone());
            let p = kkt_solve(&qp, &pair).unwrap();
            let c = certify(&qp, &p).unwrap();
            assert!(c.stationarity <= 1e-10, "stationarity {}", c.stationarity);
            assert_eq!(c.complementarity, 0.0);
            for &i in &up {
                assert_eq!(p.x[i], 1.0);
            }
            for &i in &lo {
                assert_eq!(p.x[i], -1.0);
            }
        }
    }

    #[test]
    fn operator_mode_matches_matrix_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 10;
        let q_mat = random_spd(n, 1e2, &mut rng);
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let sym = SymMatrix::dense(q_mat).unwrap();
        let a = BoxQP::new(Hessian::Matrix(sym.clone()), q.clone(), vec![-1.0; n], vec![1.0; n]).unwrap();
        let b = BoxQP::new(
            Hessian::Operator(LinearOperator::from_matrix(sym)),
            q,
            vec![-1.0; n],
            vec![1.0; n],
        )
        .unwrap();
        let pair = ActivePair::new(vec![1, 4], vec![7]);
        let pa = kkt_solve(&a, &pair).unwrap();
        let pb = kkt_solve(&b, &pair).unwrap();
        for (x, y) in pa.x.iter().zip(&pb.x) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn feasibility_checks() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![0.0; 2], vec![0.0; 2], vec![1.0; 2]).unwrap();
        let tol = qp.primal_tolerance();
        assert!(is_primal_feasible(&qp, &[0.5, 0.5], tol));
        assert!(!is_primal_feasible(&qp, &[0.5, 1.0 + 2.0 * tol], tol));
        assert!(is_primal_feasible(&qp, &[0.0, 1.0], tol));
    }

    #[test]
    fn optimality_checks() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![-0.5; 2], vec![0.0; 2], vec![1.0; 2]).unwrap();
        let p = kkt_solve(&qp, &ActivePair::empty()).unwrap();
        assert!(is_optimal(&qp, &p, qp.dual_tolerance()));

        let one = BoxQP::dense(DenseMatrix::from_diagonal(&[2.0]), vec![-6.0], vec![0.0], vec![1.0]).unwrap();
        let p = kkt_solve(&one, &ActivePair::new(vec![0], vec![])).unwrap();
        assert_eq!(p.alpha, vec![4.0]);
        assert!(is_optimal(&one, &p, one.dual_tolerance()));

        // q = 1 at x = 0 would give γ = 1; q = -1 gives γ = -1
        let neg = BoxQP::dense(DenseMatrix::from_diagonal(&[2.0]), vec![-1.0], vec![0.0], vec![1.0]).unwrap();
        let p = kkt_solve(&neg, &ActivePair::new(vec![], vec![0])).unwrap();
        assert_eq!(p.gamma, vec![-1.0]);
        assert!(!is_optimal(&neg, &p, neg.dual_tolerance()));
    }

    #[test]
    fn rejects_invalid_pair() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![0.0; 2], vec![0.0; 2], vec![f64::INFINITY; 2]).unwrap();
        assert!(matches!(
            kkt_solve(&qp, &ActivePair::new(vec![0], vec![])),
            Err(QpError::InvalidPair(_))
        ));
        assert!(matches!(
            kkt_solve(&qp, &ActivePair::new(vec![], vec![0, 5])),
            Err(QpError::InvalidPair(_))
        ));
    }
}
