use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use crate::fem2d::{
    assemble_mass_p1, assemble_stiffness, assemble_weighted_mass, prolong_free, restrict_matrix_to_free,
    restrict_to_free, StructuredMesh,
};
use crate::linalg::{self, LinearOperator, SymMatrix};
use crate::qp::{BoxQP, FactoredHessian, GramTerm, Hessian};

use super::{GnError, GnIterate, InverseProblem, ProblemKind, Result};

/// How the Gauss-Newton Hessian is handed to the QP solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QpMode {
    /// Explicit dense matrix.
    Dense,
    /// Matrix-free products; reduced systems by CG.
    Operator,
    /// Gram terms with sparse Schur-complement reduced solves.
    #[default]
    Factored,
}

impl QpMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dense => "dense",
            Self::Operator => "operator",
            Self::Factored => "factored",
        }
    }
}

impl FromStr for QpMode {
    type Err = GnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Self::Dense),
            "operator" => Ok(Self::Operator),
            "factored" => Ok(Self::Factored),
            _ => Err(GnError::InvalidProblem(format!("unknown qp mode '{s}'"))),
        }
    }
}

/// One assembled Gauss-Newton step.
#[derive(Debug, Clone)]
pub struct GnQp {
    pub qp: BoxQP,
    /// ½ Σ sᵢᵀK⁻¹sᵢ, dropped from the QP objective.
    pub constant: f64,
    param_len: usize,
    state_len: usize,
    num_obs: usize,
}

impl GnQp {
    pub fn param_range(&self) -> Range<usize> {
        0..self.param_len
    }

    pub fn state_range(&self, obs: usize) -> Range<usize> {
        let start = self.param_len + obs * self.state_len;
        start..start + self.state_len
    }

    /// Packs an iterate into the QP unknown.
    pub fn to_z(&self, mesh: &StructuredMesh, it: &GnIterate) -> Result<Vec<f64>> {
        let mut z = it.param.clone();
        for s in &it.states {
            z.extend(restrict_to_free(mesh, s)?);
        }
        if z.len() != self.qp.n() {
            return Err(GnError::DimensionMismatch {
                expected: self.qp.n(),
                got: z.len(),
            });
        }
        Ok(z)
    }

    pub fn to_iterate(&self, mesh: &StructuredMesh, z: &[f64]) -> Result<GnIterate> {
        let states = (0..self.num_obs)
            .map(|i| prolong_free(mesh, &z[self.state_range(i)]))
            .collect::<std::result::Result<_, _>>()?;
        Ok(GnIterate {
            param: z[self.param_range()].to_vec(),
            states,
        })
    }

    /// QP objective plus the dropped constant: the linearized cost at z.
    pub fn model_cost(&self, z: &[f64]) -> Result<f64> {
        Ok(self.qp.objective(z)? + self.constant)
    }
}

/// Discrete H¹ inner product on free nodes, K + M.
pub fn reg_matrix(mesh: &StructuredMesh) -> Result<SymMatrix> {
    let k = assemble_stiffness(mesh, &vec![1.0; mesh.num_cells()])?;
    let s = k.add(&assemble_mass_p1(mesh))?;
    Ok(restrict_matrix_to_free(mesh, &s)?)
}

/// Linearizes the residual at `it` and builds the QP
/// `min ½ Σᵢ ‖Rᵢz − sᵢ‖²_{K⁻¹} (+ α/2 Σᵢ φᵢᵀSφᵢ)` over the parameter box and
/// the data corridor.
pub fn assemble_gn_qp(problem: &InverseProblem, it: &GnIterate, mode: QpMode) -> Result<GnQp> {
    problem.check_iterate(it)?;
    let mesh = problem.mesh();
    let np = problem.param_len();
    let nf = mesh.num_free();
    let n = problem.qp_dim();

    let mut terms = Vec::new();
    let mut q = vec![0.0; n];
    let mut constant = 0.0;
    for (i, (phi, g)) in it.states.iter().zip(problem.loads()).enumerate() {
        let (param_block, state_block, s) = match problem.kind() {
            ProblemKind::Source => (problem.mass_rows.scaled(-1.0), problem.k_free.to_sparse(), g.clone()),
            ProblemKind::Potential => {
                let coupling = problem.coupling(phi)?;
                let mc = restrict_matrix_to_free(mesh, &assemble_weighted_mass(mesh, &it.param)?)?;
                let mut s = coupling.mul_vec(&it.param)?;
                linalg::axpy(1.0, g, &mut s);
                (coupling, problem.k_free.add(&mc)?.to_sparse(), s)
            }
            ProblemKind::Diffusion => {
                let coupling = problem.coupling(phi)?;
                let ka = restrict_matrix_to_free(mesh, &assemble_stiffness(mesh, &it.param)?)?;
                let mut s = coupling.mul_vec(&it.param)?;
                linalg::axpy(1.0, g, &mut s);
                (coupling, ka.to_sparse(), s)
            }
        };
        let map = param_block
            .embed_columns(n, 0)
            .add(&state_block.embed_columns(n, np + i * nf))?;
        let ks = linalg::solve(&problem.k_fact, &s)?;
        constant += 0.5 * linalg::dot(&s, &ks);
        map.tr_mul_vec_add(&ks.iter().map(|v| -v).collect::<Vec<_>>(), &mut q);
        terms.push(GramTerm::with_factor(map, problem.k_free.clone(), problem.k_fact.clone())?);
    }

    if problem.kind() == ProblemKind::Diffusion && problem.alpha() > 0.0 {
        // α φᵀSφ = (√α Sφ)ᵀ S⁻¹ (√α Sφ)
        let s = reg_matrix(mesh)?;
        let s_fact = Arc::new(linalg::factorize(&s)?);
        let scaled = s.to_sparse().scaled(problem.alpha().sqrt());
        let s = Arc::new(s);
        for i in 0..problem.num_observations() {
            let map = scaled.embed_columns(n, np + i * nf);
            terms.push(GramTerm::with_factor(map, s.clone(), s_fact.clone())?);
        }
    }

    let factored = FactoredHessian::new(n, terms)?;
    let hessian = match mode {
        QpMode::Factored => Hessian::Factored(factored),
        QpMode::Dense => {
            let mut d = factored.to_dense()?;
            d.symmetrize();
            Hessian::Matrix(SymMatrix::dense(d)?)
        }
        QpMode::Operator => Hessian::Operator(LinearOperator::new(n, move |x| {
            factored.apply(x).expect("operator applied to a vector of the wrong length")
        })),
    };

    let mut lower = problem.lower().to_vec();
    let mut upper = problem.upper().to_vec();
    let hw = problem.corridor_half_width();
    for y in problem.observations() {
        for &v in mesh.free_nodes() {
            lower.push(y[v] - hw);
            upper.push(y[v] + hw);
        }
    }
    let qp = BoxQP::new(hessian, q, lower, upper)?.with_proximal_shift(problem.eps_rel())?;
    Ok(GnQp {
        qp,
        constant,
        param_len: np,
        state_len: nf,
        num_obs: problem.num_observations(),
    })
}
