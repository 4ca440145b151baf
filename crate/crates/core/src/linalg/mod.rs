//! Dense and sparse symmetric linear algebra.
//!
//! Storage types ([`DenseMatrix`], [`CsrMatrix`], [`SymMatrix`]), Cholesky
//! factorization with a dense path and an RCM-ordered envelope sparse path,
//! conjugate gradients on matrix-free [`LinearOperator`]s, and principal
//! submatrix extraction for active-set updates.

mod cg;
mod cholesky;
mod dense;
mod operator;
mod ordering;
mod sparse;
mod sym;

pub use cg::{cg_solve, CgSolution};
pub use cholesky::{factorize, factorize_with_pivot, solve, CholeskyFactor, SymbolicCholesky};
pub use dense::DenseMatrix;
pub use operator::LinearOperator;
pub use ordering::reverse_cuthill_mckee;
pub use sparse::CsrMatrix;
pub use sym::{extract_principal_submatrix, SymMatrix};

use thiserror::Error;

/// Relative pivot threshold below which a factorization is declared not
/// positive definite.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("CG did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index set must be strictly increasing")]
    UnsortedIndices,
    #[error("matrix is not symmetric: |M[{i},{j}] - M[{j},{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four accumulators so the loop vectorizes
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// y += a * x
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_index_set(idx: &[usize], dim: usize) -> Result<()> {
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(LinalgError::UnsortedIndices);
        }
    }
    if let Some(&last) = idx.last() {
        if last >= dim {
            return Err(LinalgError::IndexOutOfRange { index: last, dim });
        }
    }
    Ok(())
}
