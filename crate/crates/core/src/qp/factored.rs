use std::sync::Arc;

use crate::linalg::{
    self, factorize, CholeskyFactor, CsrMatrix, DenseMatrix, LinalgError, SymMatrix, SymbolicCholesky,
};

use super::{QpError, Result};

/// One summand `Rᵀ K⁻¹ R` of a [`FactoredHessian`].
#[derive(Debug, Clone)]
pub struct GramTerm {
    map: CsrMatrix,
    weight: Arc<SymMatrix>,
    factor: Arc<CholeskyFactor>,
}

impl GramTerm {
    /// `map` is R (m×n), `weight` is the SPD matrix K (m×m).
    pub fn new(map: CsrMatrix, weight: SymMatrix) -> Result<Self> {
        if weight.dim() != map.nrows() {
            return Err(QpError::DimensionMismatch {
                expected: map.nrows(),
                got: weight.dim(),
            });
        }
        let factor = factorize(&weight)?;
        Ok(Self {
            map,
            weight: Arc::new(weight),
            factor: Arc::new(factor),
        })
    }

    /// Reuses an existing factorization of `weight`.
    pub fn with_factor(map: CsrMatrix, weight: Arc<SymMatrix>, factor: Arc<CholeskyFactor>) -> Result<Self> {
        if weight.dim() != map.nrows() || factor.dim() != map.nrows() {
            return Err(QpError::DimensionMismatch {
                expected: map.nrows(),
                got: weight.dim(),
            });
        }
        Ok(Self { map, weight, factor })
    }

    pub fn map(&self) -> &CsrMatrix {
        &self.map
    }

    pub fn weight(&self) -> &SymMatrix {
        &self.weight
    }

    /// Rᵀ K⁻¹ R x added into `out`.
    fn apply_add(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let rx = self.map.mul_vec(x)?;
        let y = linalg::solve(&self.factor, &rx)?;
        self.map.tr_mul_vec_add(&y, out);
        Ok(())
    }
}

/// Hessian `Q = Σⱼ Rⱼᵀ Kⱼ⁻¹ Rⱼ` kept in factored form.
///
/// Reduced systems `(Q_II + σI) x = b` with σ > 0 are solved through the
/// Woodbury identity: only the sparse matrix `K̂ + σ⁻¹ R̂_I R̂_Iᵀ` of the stacked
/// terms is factored, never a dense block of Q.
#[derive(Debug, Clone)]
pub struct FactoredHessian {
    n: usize,
    terms: Vec<GramTerm>,
    trace: f64,
    plan: Arc<SchurPlan>,
}

/// Precomputed sparsity of the Schur matrix and per-column contributions.
#[derive(Debug)]
struct SchurPlan {
    /// Stacked R̂ (m×n).
    stacked: CsrMatrix,
    /// Pattern of blockdiag(K) + R̂R̂ᵀ holding the blockdiag(K) values.
    base: CsrMatrix,
    /// For column c: entries `scatter[col_ptr[c]..col_ptr[c+1]]` of (position, R̂_ac R̂_bc).
    col_ptr: Vec<usize>,
    scatter: Vec<(usize, f64)>,
    diag_pos: Vec<usize>,
    symbolic: SymbolicCholesky,
}

impl FactoredHessian {
    pub fn new(n: usize, terms: Vec<GramTerm>) -> Result<Self> {
        for t in &terms {
            if t.map.ncols() != n {
                return Err(QpError::DimensionMismatch {
                    expected: n,
                    got: t.map.ncols(),
                });
            }
        }
        let mut trace = 0.0;
        for t in &terms {
            let cols = t.map.transpose();
            for c in 0..n {
                let mut col = vec![0.0; t.map.nrows()];
                let mut any = false;
                for (r, v) in cols.row(c) {
                    col[r] = v;
                    any = true;
                }
                if any {
                    trace += t.factor.inverse_quadratic_form(&col)?;
                }
            }
        }
        let plan = Arc::new(SchurPlan::build(n, &terms));
        Ok(Self { n, terms, trace, plan })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[GramTerm] {
        &self.terms
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(QpError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        for t in &self.terms {
            t.apply_add(x, &mut out)?;
        }
        Ok(out)
    }

    /// Explicit dense Q (symmetrized).
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mut q = DenseMatrix::zeros(self.n, self.n);
        for t in &self.terms {
            let cols = t.map.transpose();
            let m = t.map.nrows();
            for c in 0..self.n {
                let mut col = vec![0.0; m];
                let mut any = false;
                for (r, v) in cols.row(c) {
                    col[r] = v;
                    any = true;
                }
                if !any {
                    continue;
                }
                let y = linalg::solve(&t.factor, &col)?;
                let qc = t.map.tr_mul_vec(&y)?;
                for (i, v) in qc.into_iter().enumerate() {
                    q.add_to(i, c, v);
                }
            }
        }
        q.symmetrize();
        Ok(q)
    }

    /// Q[idx, idx] in factored form.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        linalg::check_index_set(idx, self.n)?;
        let terms = self
            .terms
            .iter()
            .map(|t| GramTerm {
                map: t.map.select_columns(idx),
                weight: t.weight.clone(),
                factor: t.factor.clone(),
            })
            .collect();
        Self::new(idx.len(), terms)
    }

    /// Solves `(Q_II + σI) x_I = b` for the sorted index set `idx`.
    pub(crate) fn solve_reduced(&self, idx: &[usize], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
        if idx.is_empty() {
            return Ok(Vec::new());
        }
        if !(sigma > 0.0) {
            let sub = self.restrict(idx)?.to_dense()?;
            let f = factorize(&SymMatrix::Dense(sub)).map_err(QpError::SingularReducedSystem)?;
            return Ok(linalg::solve(&f, b)?);
        }
        let schur = self.plan.factor(idx, sigma)?;
        let inner = |r: &[f64]| -> Result<Vec<f64>> {
            let mut full = vec![0.0; self.n];
            for (k, &i) in idx.iter().enumerate() {
                full[i] = r[k];
            }
            let mut t = self.plan.stacked.mul_vec(&full)?;
            for (v, d) in t.iter_mut().zip(&schur.scale) {
                *v *= d / sigma;
            }
            let mut w = linalg::solve(&schur.factor, &t)?;
            for (v, d) in w.iter_mut().zip(&schur.scale) {
                *v *= d;
            }
            let rw = self.plan.stacked.tr_mul_vec(&w)?;
            Ok(idx.iter().enumerate().map(|(k, &i)| (r[k] - rw[i]) / sigma).collect())
        };
        let mut x = inner(b)?;
        // the Woodbury form cancels O(1/σ) terms; refine against the true operator
        let bnorm = linalg::norm2(b);
        let mut r = self.reduced_residual(idx, sigma, &x, b)?;
        let mut rn = linalg::norm2(&r);
        for _ in 0..8 {
            if rn <= 1e-15 * bnorm {
                break;
            }
            let mut trial = x.clone();
            linalg::axpy(1.0, &inner(&r)?, &mut trial);
            let r_trial = self.reduced_residual(idx, sigma, &trial, b)?;
            let rn_trial = linalg::norm2(&r_trial);
            if !(rn_trial < rn) {
                break;
            }
            let stalled = rn_trial > 0.5 * rn;
            x = trial;
            r = r_trial;
            rn = rn_trial;
            if stalled {
                break;
            }
        }
        Ok(x)
    }

    fn reduced_residual(&self, idx: &[usize], sigma: f64, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let mut full = vec![0.0; self.n];
        for (k, &i) in idx.iter().enumerate() {
            full[i] = x[k];
        }
        let qx = self.apply(&full)?;
        Ok(idx
            .iter()
            .enumerate()
            .map(|(k, &i)| b[k] - qx[i] - sigma * x[k])
            .collect())
    }
}

struct SchurFactor {
    factor: CholeskyFactor,
    scale: Vec<f64>,
}

impl SchurPlan {
    fn build(n: usize, terms: &[GramTerm]) -> Self {
        let m: usize = terms.iter().map(|t| t.map.nrows()).sum();
        let mut trip = Vec::new();
        let mut stacked_trip = Vec::new();
        let mut offset = 0;
        for t in terms {
            let k = t.weight.to_sparse();
            for (i, j, v) in k.triplets() {
                trip.push((i + offset, j + offset, v));
            }
            for (i, j, v) in t.map.triplets() {
                stacked_trip.push((i + offset, j, v));
            }
            offset += t.map.nrows();
        }
        let stacked = CsrMatrix::from_triplets(m, n, &stacked_trip);
        let cols = stacked.transpose();
        for c in 0..n {
            let entries: Vec<(usize, f64)> = cols.row(c).collect();
            for &(a, _) in &entries {
                for &(b, _) in &entries {
                    trip.push((a, b, 0.0));
                }
            }
        }
        for i in 0..m {
            trip.push((i, i, 0.0));
        }
        let base = CsrMatrix::from_triplets(m, m, &trip);
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut scatter = Vec::new();
        col_ptr.push(0);
        for c in 0..n {
            let entries: Vec<(usize, f64)> = cols.row(c).collect();
            for &(a, va) in &entries {
                for &(b, vb) in &entries {
                    let pos = base.position(a, b).expect("pattern contains all column pairs");
                    scatter.push((pos, va * vb));
                }
            }
            col_ptr.push(scatter.len());
        }
        let diag_pos = (0..m).map(|i| base.position(i, i).expect("diagonal present")).collect();
        let symbolic = SymbolicCholesky::analyze(&base).expect("base pattern is square");
        Self {
            stacked,
            base,
            col_ptr,
            scatter,
            diag_pos,
            symbolic,
        }
    }

    fn factor(&self, idx: &[usize], sigma: f64) -> Result<SchurFactor> {
        let mut s = self.base.clone();
        {
            let vals = s.values_mut();
            let inv = 1.0 / sigma;
            for &c in idx {
                for &(pos, coef) in &self.scatter[self.col_ptr[c]..self.col_ptr[c + 1]] {
                    vals[pos] += coef * inv;
                }
            }
        }
        let mut scale = Vec::with_capacity(self.diag_pos.len());
        for &p in &self.diag_pos {
            let d = s.values()[p];
            if !(d > 0.0) {
                return Err(QpError::SingularReducedSystem(LinalgError::NotPositiveDefinite {
                    row: scale.len(),
                    pivot: d,
                }));
            }
            scale.push(1.0 / d.sqrt());
        }
        let row_ptr = s.row_ptr().to_vec();
        let col_idx = s.col_idx().to_vec();
        let vals = s.values_mut();
        for i in 0..scale.len() {
            for p in row_ptr[i]..row_ptr[i + 1] {
                vals[p] *= scale[i] * scale[col_idx[p]];
            }
        }
        let factor = self
            .symbolic
            .factor(s.values(), 0.0)
            .map_err(QpError::SingularReducedSystem)?;
        Ok(SchurFactor { factor, scale })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_terms(n: usize, rng: &mut ChaCha8Rng) -> Vec<GramTerm> {
        let mut terms = Vec::new();
        for m in [5usize, 3] {
            let mut trip = Vec::new();
            for i in 0..m {
                for j in 0..n {
                    if rng.gen_bool(0.4) {
                        trip.push((i, j, rng.gen_range(-1.0..1.0)));
                    }
                }
            }
            let map = CsrMatrix::from_triplets(m, n, &trip);
            // tridiagonal SPD weight
            let mut kt = Vec::new();
            for i in 0..m {
                kt.push((i, i, 3.0));
                if i + 1 < m {
                    kt.push((i, i + 1, -1.0));
                    kt.push((i + 1, i, -1.0));
                }
            }
            let weight = SymMatrix::sparse(CsrMatrix::from_triplets(m, m, &kt)).unwrap();
            terms.push(GramTerm::new(map, weight).unwrap());
        }
        terms
    }

    fn dense_oracle(terms: &[GramTerm], n: usize) -> DenseMatrix {
        let mut q = DenseMatrix::zeros(n, n);
        for t in terms {
            let r = t.map.to_dense();
            let mut kinv_r = DenseMatrix::zeros(r.nrows(), n);
            let f = factorize(&t.weight).unwrap();
            for c in 0..n {
                let col: Vec<f64> = (0..r.nrows()).map(|i| r.get(i, c)).collect();
                let y = linalg::solve(&f, &col).unwrap();
                for i in 0..r.nrows() {
                    kinv_r.set(i, c, y[i]);
                }
            }
            let p = r.transpose().matmul(&kinv_r).unwrap();
            for i in 0..n {
                for j in 0..n {
                    q.add_to(i, j, p.get(i, j));
                }
            }
        }
        q
    }

    #[test]
    fn dense_assembly_and_trace_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 9;
        let terms = random_terms(n, &mut rng);
        let oracle = dense_oracle(&terms, n);
        let h = FactoredHessian::new(n, terms).unwrap();
        let d = h.to_dense().unwrap();
        let tr: f64 = (0..n).map(|i| oracle.get(i, i)).sum();
        assert!((h.trace() - tr).abs() < 1e-12 * tr.abs().max(1.0));
        for i in 0..n {
            for j in 0..n {
                assert!((d.get(i, j) - oracle.get(i, j)).abs() < 1e-12);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 4.0).collect();
        let y = h.apply(&x).unwrap();
        let yo = oracle.mul_vec(&x).unwrap();
        for (a, b) in y.iter().zip(&yo) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_solve_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let terms = random_terms(n, &mut rng);
        let h = FactoredHessian::new(n, terms).unwrap();
        let full = h.to_dense().unwrap();
        let idx = vec![0, 2, 3, 7, 8, 11];
        for sigma in [1e-1, 1e-6, 1e-10] {
            let sub = SymMatrix::dense(full.clone()).unwrap();
            let sub = linalg::extract_principal_submatrix(&sub, &idx).unwrap().shifted(sigma);
            let b: Vec<f64> = (0..idx.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = h.solve_reduced(&idx, sigma, &b).unwrap();
            let r = sub.mul_vec(&x).unwrap();
            let res: f64 = r.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = sub.max_abs() * linalg::norm_inf(&x) + linalg::norm_inf(&b);
            assert!(res <= 1e-10 * scale, "sigma {sigma}: residual {res}");
        }
    }

    #[test]
    fn restrict_matches_submatrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 7;
        let h = FactoredHessian::new(n, random_terms(n, &mut rng)).unwrap();
        let full = h.to_dense().unwrap();
        let idx = [1, 4, 6];
        let sub = h.restrict(&idx).unwrap().to_dense().unwrap();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                assert!((sub.get(a, b) - full.get(i, j)).abs() < 1e-13);
            }
        }
    }
}
