//! Strictly convex box-constrained quadratic programs
//!
//! ```text
//!     minimize    J(x) = ½ xᵀQx + qᵀx
//!     subject to  ℓ ≤ x ≤ u
//! ```
//!
//! solved by the primal feasible active-set method ([`feasible_active_set`]),
//! with an exhaustive enumeration oracle ([`enumerate_oracle`]) for small
//! instances. The Hessian may be an explicit matrix, a matrix-free operator,
//! or a [`FactoredHessian`] `Σ Rⱼᵀ Kⱼ⁻¹ Rⱼ` whose reduced systems are solved
//! through a sparse Schur complement.

mod active_set;
mod factored;
pub mod io;
mod kkt;
mod oracle;
mod pair;
mod subproblem;

pub use active_set::{
    feasible_active_set, feasible_active_set_with, make_primal_feasible, QpSolution, SolveOptions,
    SolveReport,
};
pub use factored::{FactoredHessian, GramTerm};
pub use kkt::{certify, is_optimal, is_primal_feasible, kkt_solve, KktCertificate, KktPoint};
pub use oracle::{enumerate_oracle, ORACLE_MAX_DIM};
pub use pair::ActivePair;
pub use subproblem::{fix_subproblem, FixedSubproblem};

use thiserror::Error;

use crate::linalg::{self, LinalgError, LinearOperator, SymMatrix};

#[derive(Debug, Error)]
pub enum QpError {
    #[error("reduced KKT system is singular: {0}")]
    SingularReducedSystem(LinalgError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("iteration limit {limit} exceeded")]
    IterationLimit { limit: usize },
    #[error("invalid bounds at index {index}: lower {lower} must be < upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("invalid active pair: {0}")]
    InvalidPair(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration oracle limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("enumeration found no optimal partition")]
    NoOptimalPartition,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QpError>;

/// Quadratic term of a [`BoxQP`].
#[derive(Debug, Clone)]
pub enum Hessian {
    Matrix(SymMatrix),
    Operator(LinearOperator),
    Factored(FactoredHessian),
}

impl Hessian {
    pub fn dim(&self) -> usize {
        match self {
            Self::Matrix(m) => m.dim(),
            Self::Operator(op) => op.dim(),
            Self::Factored(f) => f.dim(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Matrix(m) => m.mul_vec(x)?,
            Self::Operator(op) => op.apply(x)?,
            Self::Factored(f) => f.apply(x)?,
        })
    }

    pub fn trace(&self) -> Result<f64> {
        Ok(match self {
            Self::Matrix(m) => m.trace(),
            Self::Operator(op) => {
                let n = op.dim();
                let mut e = vec![0.0; n];
                let mut t = 0.0;
                for i in 0..n {
                    e[i] = 1.0;
                    t += op.apply(&e)?[i];
                    e[i] = 0.0;
                }
                t
            }
            Self::Factored(f) => f.trace(),
        })
    }

    /// Dense copy of the matrix (column-by-column application for operators).
    pub fn to_dense(&self) -> Result<linalg::DenseMatrix> {
        match self {
            Self::Matrix(m) => Ok(m.to_dense()),
            Self::Factored(f) => f.to_dense(),
            Self::Operator(op) => {
                let n = op.dim();
                let mut out = linalg::DenseMatrix::zeros(n, n);
                let mut e = vec![0.0; n];
                for j in 0..n {
                    e[j] = 1.0;
                    let col = op.apply(&e)?;
                    e[j] = 0.0;
                    for (i, v) in col.into_iter().enumerate() {
                        out.set(i, j, v);
                    }
                }
                out.symmetrize();
                Ok(out)
            }
        }
    }

    /// Principal restriction Q[idx, idx].
    pub fn restrict(&self, idx: &[usize]) -> Result<Hessian> {
        Ok(match self {
            Self::Matrix(m) => Self::Matrix(linalg::extract_principal_submatrix(m, idx)?),
            Self::Factored(f) => Self::Factored(f.restrict(idx)?),
            Self::Operator(op) => {
                let op = op.clone();
                let idx = idx.to_vec();
                let n = op.dim();
                Self::Operator(LinearOperator::new(idx.len(), move |x| {
                    let mut full = vec![0.0; n];
                    for (k, &i) in idx.iter().enumerate() {
                        full[i] = x[k];
                    }
                    let y = op.apply(&full).expect("dimension fixed at construction");
                    idx.iter().map(|&i| y[i]).collect()
                }))
            }
        })
    }
}

/// Box-constrained QP `min ½xᵀ(Q + σI)x + qᵀx, ℓ ≤ x ≤ u` where σ ≥ 0 is an
/// optional proximal shift.
#[derive(Debug, Clone)]
pub struct BoxQP {
    hessian: Hessian,
    q: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    shift: f64,
}

impl BoxQP {
    pub fn new(hessian: Hessian, q: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = hessian.dim();
        for len in [q.len(), lower.len(), upper.len()] {
            if len != n {
                return Err(QpError::DimensionMismatch { expected: n, got: len });
            }
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(QpError::Linalg(LinalgError::NonFinite));
        }
        for i in 0..n {
            let (l, u) = (lower[i], upper[i]);
            if l.is_nan() || u.is_nan() || !(l < u) || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(QpError::InvalidBounds { index: i, lower: l, upper: u });
            }
        }
        Ok(Self {
            hessian,
            q,
            lower,
            upper,
            shift: 0.0,
        })
    }

    /// Dense-matrix convenience constructor.
    pub fn dense(q_mat: linalg::DenseMatrix, q: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(Hessian::Matrix(SymMatrix::dense(q_mat)?), q, lower, upper)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn hessian(&self) -> &Hessian {
        &self.hessian
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Absolute diagonal shift σ currently added to Q.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Sets σ = `eps_rel` · trace(Q)/n (trace of the unshifted Hessian).
    pub fn with_proximal_shift(mut self, eps_rel: f64) -> Result<Self> {
        let n = self.n().max(1) as f64;
        let t = self.hessian.trace()?;
        self.shift = eps_rel * (t / n).abs();
        Ok(self)
    }

    pub fn with_absolute_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// (Q + σI) x
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.hessian.apply(x)?;
        if self.shift != 0.0 {
            linalg::axpy(self.shift, x, &mut y);
        }
        Ok(y)
    }

    /// Qx + q
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.apply(x)?;
        for (gi, qi) in g.iter_mut().zip(&self.q) {
            *gi += qi;
        }
        Ok(g)
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let qx = self.apply(x)?;
        Ok(0.5 * linalg::dot(x, &qx) + linalg::dot(&self.q, x))
    }

    /// Feasibility tolerance 1e-12·(1 + ‖u‖∞ + ‖ℓ‖∞) over finite bounds.
    pub fn primal_tolerance(&self) -> f64 {
        let finite_max = |v: &[f64]| v.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
        1e-12 * (1.0 + finite_max(&self.upper) + finite_max(&self.lower))
    }

    /// Dual tolerance 1e-9·(1 + ‖q‖∞).
    pub fn dual_tolerance(&self) -> f64 {
        1e-9 * (1.0 + linalg::norm_inf(&self.q))
    }
}
