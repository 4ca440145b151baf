use super::{axpy, check_len, dot, LinalgError, LinearOperator, Result};

#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final ‖op(x) − b‖ / ‖b‖.
    pub relative_residual: f64,
}

/// Unpreconditioned conjugate gradients from a zero initial guess.
pub fn cg_solve(op: &LinearOperator, b: &[f64], tol: f64, maxit: usize) -> Result<CgSolution> {
    let n = op.dim();
    check_len(n, b.len())?;
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 1..=maxit {
        let ap = op.apply(&p)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(LinalgError::NotPositiveDefinite { row: it, pivot: pap });
        }
        let step = rr / pap;
        axpy(step, &p, &mut x);
        axpy(-step, &ap, &mut r);
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= tol * bnorm {
            // confirm with a true residual
            let ax = op.apply(&x)?;
            let true_res: f64 = ax
                .iter()
                .zip(b)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if true_res <= tol * bnorm {
                return Ok(CgSolution {
                    x,
                    iterations: it,
                    relative_residual: true_res / bnorm,
                });
            }
            r = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            p = r.clone();
            rr = dot(&r, &r);
            continue;
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    Err(LinalgError::NoConvergence {
        iterations: maxit,
        residual: rr.sqrt() / bnorm,
    })
}
