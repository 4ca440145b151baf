use super::{check_index_set, check_len, CsrMatrix, DenseMatrix, LinalgError, Result};

/// Symmetric matrix, stored densely or as CSR with both triangles present.
#[derive(Debug, Clone, PartialEq)]
pub enum SymMatrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

const SYMMETRY_TOL: f64 = 1e-12;

impl SymMatrix {
    /// Wraps a dense matrix after checking that it is square and symmetric.
    pub fn dense(m: DenseMatrix) -> Result<Self> {
        check_len(m.nrows(), m.ncols())?;
        if m.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let tol = SYMMETRY_TOL * m.max_abs();
        let n = m.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let diff = (m.get(i, j) - m.get(j, i)).abs();
                if diff > tol {
                    return Err(LinalgError::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self::Dense(m))
    }

    /// Wraps a CSR matrix after checking that it is square and symmetric.
    pub fn sparse(m: CsrMatrix) -> Result<Self> {
        check_len(m.nrows(), m.ncols())?;
        if m.values().iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let tol = SYMMETRY_TOL * m.max_abs();
        for i in 0..m.nrows() {
            for (j, v) in m.row(i) {
                let diff = (v - m.get(j, i)).abs();
                if diff > tol {
                    return Err(LinalgError::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self::Sparse(m))
    }

    pub fn identity(n: usize) -> Self {
        Self::Dense(DenseMatrix::identity(n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::Dense(DenseMatrix::from_diagonal(d))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Sparse(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Dense(m) => m.get(i, j),
            Self::Sparse(m) => m.get(i, j),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Dense(m) => m.mul_vec(x),
            Self::Sparse(m) => m.mul_vec(x),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Dense(m) => m.max_abs(),
            Self::Sparse(m) => m.max_abs(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            Self::Dense(m) => CsrMatrix::from_dense(m),
            Self::Sparse(m) => m.clone(),
        }
    }

    /// Returns M + s·I in the same storage mode.
    pub fn shifted(&self, s: f64) -> Self {
        match self {
            Self::Dense(m) => {
                let mut m = m.clone();
                for i in 0..m.nrows() {
                    m.add_to(i, i, s);
                }
                Self::Dense(m)
            }
            Self::Sparse(m) => {
                let n = m.nrows();
                let diag: Vec<_> = (0..n).map(|i| (i, i, s)).collect();
                let d = CsrMatrix::from_triplets(n, n, &diag);
                Self::Sparse(m.add(&d).expect("same shape"))
            }
        }
    }

    /// Sum of two symmetric matrices of equal dimension; the result is sparse
    /// only if both operands are.
    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        check_len(self.dim(), other.dim())?;
        match (self, other) {
            (Self::Sparse(a), Self::Sparse(b)) => Ok(Self::Sparse(a.add(b)?)),
            _ => {
                let mut a = self.to_dense();
                let b = other.to_dense();
                let n = a.nrows();
                for i in 0..n {
                    for j in 0..n {
                        a.add_to(i, j, b.get(i, j));
                    }
                }
                Ok(Self::Dense(a))
            }
        }
    }
}

/// Principal submatrix M[idx, idx] in the storage mode of `m`.
pub fn extract_principal_submatrix(m: &SymMatrix, idx: &[usize]) -> Result<SymMatrix> {
    check_index_set(idx, m.dim())?;
    match m {
        SymMatrix::Dense(d) => {
            let k = idx.len();
            let mut out = DenseMatrix::zeros(k, k);
            for (a, &i) in idx.iter().enumerate() {
                let row = d.row(i);
                for (b, &j) in idx.iter().enumerate() {
                    out.set(a, b, row[j]);
                }
            }
            Ok(SymMatrix::Dense(out))
        }
        SymMatrix::Sparse(s) => Ok(SymMatrix::Sparse(s.select_rows(idx).select_columns(idx))),
    }
}
