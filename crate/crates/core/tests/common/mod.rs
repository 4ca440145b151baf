//! Random instance generators shared by the integration and acceptance
//! targets.
#![allow(dead_code)]

use boxinv::linalg::DenseMatrix;
use boxinv::qp::BoxQP;
use rand::Rng;

/// H diag(λ) Hᵀ where H is a product of n random Householder reflections and
/// λ is log-spaced on [1, cond].
pub fn spd_with_condition(n: usize, cond: f64, rng: &mut impl Rng) -> DenseMatrix {
    let mut h = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for _ in 0..n {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv < 1e-8 {
            continue;
        }
        // h ← h (I − 2vvᵀ/vᵀv)
        for i in 0..n {
            let hv: f64 = (0..n).map(|k| h.get(i, k) * v[k]).sum();
            for j in 0..n {
                h.add_to(i, j, -2.0 * hv * v[j] / vv);
            }
        }
    }
    let lam: Vec<f64> = (0..n)
        .map(|k| if n == 1 { 1.0 } else { cond.powf(k as f64 / (n - 1) as f64) })
        .collect();
    let mut m = DenseMatrix::from_fn(n, n, |i, j| (0..n).map(|k| h.get(i, k) * lam[k] * h.get(j, k)).sum());
    m.symmetrize();
    m
}

/// Dense box QP with finite bounds straddling or excluding the unconstrained
/// minimizer, so that both bounds end up active across instances.
pub fn random_qp(n: usize, cond: f64, rng: &mut impl Rng) -> BoxQP {
    let q_mat = spd_with_condition(n, cond, rng);
    let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.gen_range(-1.5..0.5);
        lower.push(a);
        upper.push(a + rng.gen_range(0.05..2.0));
    }
    BoxQP::dense(q_mat, q, lower, upper).unwrap()
}

/// Condition number drawn log-uniformly from [1, max].
pub fn log_uniform_cond(max: f64, rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.gen_range(0.0..max.log10()))
}
