use super::{BoxQP, KktPoint, QpError, Result};

pub const ORACLE_MAX_DIM: usize = 14;

/// Exhaustive search over all 3ⁿ (inactive, lower, upper) assignments.
/// Returns the KKT point of the first assignment that is primal and dual
/// feasible, which for Q ≻ 0 is the unique minimizer.
pub fn enumerate_oracle(qp: &BoxQP) -> Result<KktPoint> {
    let n = qp.n();
    if n > ORACLE_MAX_DIM {
        return Err(QpError::TooLarge { n, max: ORACLE_MAX_DIM });
    }
    let mut qd = qp.hessian().to_dense()?;
    for i in 0..n {
        qd.add_to(i, i, qp.shift());
    }
    let q = qp.q();
    let (lo, up) = (qp.lower(), qp.upper());
    let ptol = qp.primal_tolerance();
    let dtol = qp.dual_tolerance();

    // digit 0 inactive, 1 lower, 2 upper
    let mut digits = vec![0u8; n];
    let mut x = vec![0.0; n];
    let mut free = Vec::with_capacity(n);
    let mut l = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    loop {
        let valid = (0..n).all(|i| match digits[i] {
            1 => lo[i].is_finite(),
            2 => up[i].is_finite(),
            _ => true,
        });
        if valid {
            free.clear();
            for i in 0..n {
                match digits[i] {
                    1 => x[i] = lo[i],
                    2 => x[i] = up[i],
                    _ => {
                        x[i] = 0.0;
                        free.push(i);
                    }
                }
            }
            let k = free.len();
            for (a, &i) in free.iter().enumerate() {
                let row = qd.row(i);
                let mut s = q[i];
                for j in 0..n {
                    if digits[j] != 0 {
                        s += row[j] * x[j];
                    }
                }
                rhs[a] = -s;
            }
            if cholesky_solve(&qd, &free, &mut l, &mut rhs[..k]) {
                for (a, &i) in free.iter().enumerate() {
                    x[i] = rhs[a];
                }
                if let Some(point) = check(&qd, q, lo, up, &digits, &x, ptol, dtol) {
                    return Ok(point);
                }
            }
        }
        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == n {
                return Err(QpError::NoOptimalPartition);
            }
            digits[pos] += 1;
            if digits[pos] < 3 {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// In-place Cholesky solve of Q[free, free] y = rhs. Returns false if not PD.
fn cholesky_solve(qd: &crate::linalg::DenseMatrix, free: &[usize], l: &mut [f64], rhs: &mut [f64]) -> bool {
    let k = free.len();
    for a in 0..k {
        for b in 0..=a {
            let mut s = qd.get(free[a], free[b]);
            for c in 0..b {
                s -= l[a * k + c] * l[b * k + c];
            }
            if a == b {
                if !(s > 0.0) {
                    return false;
                }
                l[a * k + a] = s.sqrt();
            } else {
                l[a * k + b] = s / l[b * k + b];
            }
        }
    }
    for a in 0..k {
        let mut s = rhs[a];
        for c in 0..a {
            s -= l[a * k + c] * rhs[c];
        }
        rhs[a] = s / l[a * k + a];
    }
    for a in (0..k).rev() {
        let mut s = rhs[a];
        for c in a + 1..k {
            s -= l[c * k + a] * rhs[c];
        }
        rhs[a] = s / l[a * k + a];
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn check(
    qd: &crate::linalg::DenseMatrix,
    q: &[f64],
    lo: &[f64],
    up: &[f64],
    digits: &[u8],
    x: &[f64],
    ptol: f64,
    dtol: f64,
) -> Option<KktPoint> {
    let n = x.len();
    for i in 0..n {
        if digits[i] == 0 && !(lo[i] - ptol <= x[i] && x[i] <= up[i] + ptol) {
            return None;
        }
    }
    let mut alpha = vec![0.0; n];
    let mut gamma = vec![0.0; n];
    for i in 0..n {
        if digits[i] == 0 {
            continue;
        }
        let g = crate::linalg::dot(qd.row(i), x) + q[i];
        if digits[i] == 2 {
            alpha[i] = -g;
            if alpha[i] < -dtol {
                return None;
            }
        } else {
            gamma[i] = g;
            if gamma[i] < -dtol {
                return None;
            }
        }
    }
    Some(KktPoint {
        x: x.to_vec(),
        alpha,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::qp::{feasible_active_set, ActivePair};

    #[test]
    fn identity_box_example() {
        let qp = BoxQP::dense(DenseMatrix::identity(2), vec![-3.0, 0.0], vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let p = enumerate_oracle(&qp).unwrap();
        assert_eq!(p.x, vec![1.0, 0.0]);
    }

    #[test]
    fn one_d_agrees_with_active_set() {
        for q in [-6.0, -1.0, 3.0] {
            let qp = BoxQP::dense(DenseMatrix::from_diagonal(&[2.0]), vec![q], vec![0.0], vec![1.0]).unwrap();
            let o = enumerate_oracle(&qp).unwrap();
            let s = feasible_active_set(&qp, &ActivePair::all_lower(&qp)).unwrap();
            assert!((o.x[0] - s.point.x[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn too_large() {
        let n = 15;
        let qp = BoxQP::dense(DenseMatrix::identity(n), vec![0.0; n], vec![0.0; n], vec![1.0; n]).unwrap();
        assert!(matches!(enumerate_oracle(&qp), Err(QpError::TooLarge { n: 15, .. })));
    }
}
