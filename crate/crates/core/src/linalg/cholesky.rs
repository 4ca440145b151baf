use std::sync::Arc;

use super::ordering::reverse_cuthill_mckee;
use super::{check_len, dot, CsrMatrix, DenseMatrix, LinalgError, Result, SymMatrix, PIVOT_TOLERANCE};

/// Cholesky factor P M Pᵀ = L Lᵀ.
///
/// Dense matrices are factored in place with the identity permutation.
/// Sparse matrices are reordered by reverse Cuthill-McKee and factored in
/// envelope storage: row i of L is kept from its first nonzero in M, which
/// contains all fill.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    storage: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major lower triangle, n×n.
    Dense(Vec<f64>),
    /// Row i holds L[i][first[i]..=i] at vals[ptr[i]..ptr[i+1]].
    Envelope {
        first: Arc<[usize]>,
        ptr: Arc<[usize]>,
        vals: Vec<f64>,
    },
}

/// Ordering and envelope of a fixed sparsity pattern, reusable for any
/// values on that pattern.
#[derive(Debug, Clone)]
pub struct SymbolicCholesky {
    n: usize,
    nnz: usize,
    perm: Vec<usize>,
    first: Arc<[usize]>,
    ptr: Arc<[usize]>,
    /// Envelope slot of each lower-triangle CSR entry, `usize::MAX` above.
    slot: Vec<usize>,
}

impl SymbolicCholesky {
    /// Analyzes the pattern of the square matrix `pattern`, which must be
    /// structurally symmetric.
    pub fn analyze(pattern: &CsrMatrix) -> Result<Self> {
        let n = pattern.nrows();
        check_len(n, pattern.ncols())?;
        let perm = reverse_cuthill_mckee(pattern);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, _) in pattern.row(old_i) {
                first[i] = first[i].min(inv[old_j]);
            }
        }
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            ptr.push(ptr[i] + i + 1 - first[i]);
        }
        let mut slot = Vec::with_capacity(pattern.nnz());
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, _) in pattern.row(old_i) {
                let j = inv[old_j];
                slot.push(if j <= i { ptr[i] + j - first[i] } else { usize::MAX });
            }
        }
        Ok(Self {
            n,
            nnz: pattern.nnz(),
            perm,
            first: first.into(),
            ptr: ptr.into(),
            slot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of L.
    pub fn envelope_size(&self) -> usize {
        self.ptr[self.n]
    }

    /// Numeric factorization of the matrix whose CSR values (in the analyzed
    /// pattern) are `values`. A pivot at or below `pivot_rel · max diag` is
    /// rejected.
    pub fn factor(&self, values: &[f64], pivot_rel: f64) -> Result<CholeskyFactor> {
        check_len(self.nnz, values.len())?;
        let mut vals = vec![0.0; self.envelope_size()];
        for (&s, &v) in self.slot.iter().zip(values) {
            if s != usize::MAX {
                vals[s] += v;
            }
        }
        let (first, ptr) = (&self.first, &self.ptr);
        let max_diag = (0..self.n).map(|i| vals[ptr[i + 1] - 1]).fold(0.0f64, f64::max);
        let threshold = pivot_rel * max_diag;
        for i in 0..self.n {
            let fi = first[i];
            for j in fi..=i {
                // L[i][k] and L[j][k] overlap for k in max(fi, fj)..j
                let lo = fi.max(first[j]);
                let ri = ptr[i] + lo - fi;
                let rj = ptr[j] + lo - first[j];
                let len = j - lo;
                let pos = ptr[i] + j - fi;
                let s = vals[pos] - dot(&vals[ri..ri + len], &vals[rj..rj + len]);
                if i == j {
                    if !(s > threshold) {
                        return Err(LinalgError::NotPositiveDefinite {
                            row: self.perm[i],
                            pivot: s,
                        });
                    }
                    vals[pos] = s.sqrt();
                } else {
                    vals[pos] = s / vals[ptr[j + 1] - 1];
                }
            }
        }
        Ok(CholeskyFactor {
            n: self.n,
            perm: self.perm.clone(),
            storage: Storage::Envelope {
                first: first.clone(),
                ptr: ptr.clone(),
                vals,
            },
        })
    }
}

pub fn factorize(m: &SymMatrix) -> Result<CholeskyFactor> {
    factorize_with_pivot(m, PIVOT_TOLERANCE)
}

/// Factorizes with a custom relative pivot threshold: a pivot at or below
/// `pivot_rel · max diag(M)` is rejected.
pub fn factorize_with_pivot(m: &SymMatrix, pivot_rel: f64) -> Result<CholeskyFactor> {
    match m {
        SymMatrix::Dense(d) => {
            let max_diag = m.diagonal().iter().fold(0.0f64, |a, &d| a.max(d));
            dense_factor(d, pivot_rel * max_diag)
        }
        SymMatrix::Sparse(s) => SymbolicCholesky::analyze(s)?.factor(s.values(), pivot_rel),
    }
}

pub fn solve(f: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>> {
    check_len(f.n, b.len())?;
    let mut y: Vec<f64> = f.perm.iter().map(|&old| b[old]).collect();
    f.forward(&mut y);
    f.backward(&mut y);
    let mut x = vec![0.0; f.n];
    for (new, &old) in f.perm.iter().enumerate() {
        x[old] = y[new];
    }
    Ok(x)
}

fn dense_factor(a: &DenseMatrix, threshold: f64) -> Result<CholeskyFactor> {
    let n = a.nrows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                if !(s > threshold) {
                    return Err(LinalgError::NotPositiveDefinite { row: i, pivot: s });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor {
        n,
        perm: (0..n).collect(),
        storage: Storage::Dense(l),
    })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Permutation with `perm[new] = old`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Largest distance from the diagonal to the first stored entry of a row
    /// (n-1 for the dense path).
    pub fn bandwidth(&self) -> usize {
        match &self.storage {
            Storage::Dense(_) => self.n.saturating_sub(1),
            Storage::Envelope { first, .. } => first.iter().enumerate().map(|(i, &f)| i - f).max().unwrap_or(0),
        }
    }

    /// Entry L[i][j] in permuted coordinates.
    pub fn l_entry(&self, i: usize, j: usize) -> f64 {
        if j > i {
            return 0.0;
        }
        match &self.storage {
            Storage::Dense(l) => l[i * self.n + j],
            Storage::Envelope { first, ptr, vals } => {
                if j < first[i] {
                    0.0
                } else {
                    vals[ptr[i] + j - first[i]]
                }
            }
        }
    }

    /// bᵀ M⁻¹ b computed as ‖L⁻¹ P b‖².
    pub fn inverse_quadratic_form(&self, b: &[f64]) -> Result<f64> {
        check_len(self.n, b.len())?;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.forward(&mut y);
        Ok(dot(&y, &y))
    }

    fn forward(&self, y: &mut [f64]) {
        let n = self.n;
        match &self.storage {
            Storage::Dense(l) => {
                for i in 0..n {
                    let s = y[i] - dot(&l[i * n..i * n + i], &y[..i]);
                    y[i] = s / l[i * n + i];
                }
            }
            Storage::Envelope { first, ptr, vals } => {
                for i in 0..n {
                    let (lo, r) = (first[i], ptr[i]);
                    let s = y[i] - dot(&vals[r..r + (i - lo)], &y[lo..i]);
                    y[i] = s / vals[ptr[i + 1] - 1];
                }
            }
        }
    }

    fn backward(&self, y: &mut [f64]) {
        let n = self.n;
        match &self.storage {
            Storage::Dense(l) => {
                for i in (0..n).rev() {
                    let xi = y[i] / l[i * n + i];
                    y[i] = xi;
                    for (k, yk) in y[..i].iter_mut().enumerate() {
                        *yk -= l[i * n + k] * xi;
                    }
                }
            }
            Storage::Envelope { first, ptr, vals } => {
                for i in (0..n).rev() {
                    let xi = y[i] / vals[ptr[i + 1] - 1];
                    y[i] = xi;
                    let (lo, r) = (first[i], ptr[i]);
                    for (yk, lk) in y[lo..i].iter_mut().zip(&vals[r..r + (i - lo)]) {
                        *yk -= lk * xi;
                    }
                }
            }
        }
    }
}
