use std::sync::Arc;

use crate::fem2d::{
    self, assemble_cell_coupling_mass, assemble_mass_p1, assemble_stiffness, assemble_weighted_mass,
    restrict_matrix_to_free, restrict_rows_to_free, restrict_to_free, FieldKind, StructuredMesh,
};
use crate::linalg::{self, CholeskyFactor, CsrMatrix, SymMatrix};

use super::{GnError, ProblemKind, Result};

/// Parameter field and states of one Gauss-Newton iterate. States are full
/// nodal vectors with zeros on Dirichlet nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GnIterate {
    pub param: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// One identification problem: kind, mesh, observations and loads, bounds.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    kind: ProblemKind,
    mesh: StructuredMesh,
    /// y^δ per observation, full nodal.
    observations: Vec<Vec<f64>>,
    /// Load functionals per observation on free nodes.
    loads: Vec<Vec<f64>>,
    delta: f64,
    tau: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    alpha: f64,
    eps_rel: f64,
    pub(crate) k_free: Arc<SymMatrix>,
    pub(crate) k_fact: Arc<CholeskyFactor>,
    /// Plain mass, free rows × all nodes.
    pub(crate) mass_rows: CsrMatrix,
}

impl InverseProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: ProblemKind,
        mesh: StructuredMesh,
        observations: Vec<Vec<f64>>,
        loads: Vec<Vec<f64>>,
        delta: f64,
        tau: f64,
        lower: Vec<f64>,
        upper: Vec<f64>,
        alpha: f64,
    ) -> Result<Self> {
        let np = kind.param_kind().len(&mesh);
        if observations.is_empty() || observations.len() != loads.len() {
            return Err(GnError::InvalidProblem(format!(
                "{} observations but {} loads",
                observations.len(),
                loads.len()
            )));
        }
        for y in &observations {
            check(y.len(), mesh.num_nodes())?;
        }
        for g in &loads {
            check(g.len(), mesh.num_free())?;
        }
        check(lower.len(), np)?;
        check(upper.len(), np)?;
        if let Some(i) = (0..np).find(|&i| !(lower[i] < upper[i])) {
            return Err(GnError::InvalidProblem(format!(
                "bounds at {i}: {} !< {}",
                lower[i], upper[i]
            )));
        }
        if !(tau > 1.0) {
            return Err(GnError::InvalidProblem(format!("safety factor {tau} must exceed 1")));
        }
        if !(delta >= 0.0) || !(alpha >= 0.0) {
            return Err(GnError::InvalidProblem("delta and alpha must be nonnegative".into()));
        }
        let k = assemble_stiffness(&mesh, &vec![1.0; mesh.num_cells()])?;
        let k_free = restrict_matrix_to_free(&mesh, &k)?;
        let k_fact = linalg::factorize(&k_free)?;
        let mass_rows = restrict_rows_to_free(&mesh, &assemble_mass_p1(&mesh).to_sparse())?;
        Ok(Self {
            kind,
            mesh,
            observations,
            loads,
            delta,
            tau,
            lower,
            upper,
            alpha,
            eps_rel: 1e-10,
            k_free: Arc::new(k_free),
            k_fact: Arc::new(k_fact),
            mass_rows,
        })
    }

    /// Relative proximal shift ε_rel (shift = ε_rel · trace(Q)/n).
    pub fn with_eps_rel(mut self, eps_rel: f64) -> Self {
        self.eps_rel = eps_rel;
        self
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn mesh(&self) -> &StructuredMesh {
        &self.mesh
    }

    pub fn observations(&self) -> &[Vec<f64>] {
        &self.observations
    }

    pub fn loads(&self) -> &[Vec<f64>] {
        &self.loads
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps_rel(&self) -> f64 {
        self.eps_rel
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn param_len(&self) -> usize {
        self.kind.param_kind().len(&self.mesh)
    }

    /// QP dimension: parameter dofs plus free nodes per observation.
    pub fn qp_dim(&self) -> usize {
        self.param_len() + self.num_observations() * self.mesh.num_free()
    }

    /// Same count with Dirichlet nodes kept as state unknowns.
    pub fn qp_dim_with_dirichlet(&self) -> usize {
        self.param_len() + self.num_observations() * self.mesh.num_nodes()
    }

    /// Half-width of the data corridor, at least 5e-13 so that ℓ < u.
    pub fn corridor_half_width(&self) -> f64 {
        (self.tau * self.delta).max(0.5e-12)
    }

    /// Start iterate: parameter at the bound midpoint, states equal to the
    /// data (zero on Dirichlet nodes).
    pub fn initial_iterate(&self) -> GnIterate {
        let param = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        let states = self
            .observations
            .iter()
            .map(|y| {
                (0..self.mesh.num_nodes())
                    .map(|v| if self.mesh.is_dirichlet(v) { 0.0 } else { y[v] })
                    .collect()
            })
            .collect();
        GnIterate { param, states }
    }

    pub fn check_iterate(&self, it: &GnIterate) -> Result<()> {
        check(it.param.len(), self.param_len())?;
        if it.states.len() != self.num_observations() {
            return Err(GnError::InvalidIterate(format!(
                "{} states for {} observations",
                it.states.len(),
                self.num_observations()
            )));
        }
        for s in &it.states {
            check(s.len(), self.mesh.num_nodes())?;
        }
        Ok(())
    }

    /// Nonlinear PDE residuals on free nodes, one per observation.
    pub fn residuals(&self, it: &GnIterate) -> Result<Vec<Vec<f64>>> {
        self.check_iterate(it)?;
        let mesh = &self.mesh;
        let mut out = Vec::with_capacity(self.num_observations());
        for (phi, g) in it.states.iter().zip(&self.loads) {
            let phi_free = restrict_to_free(mesh, phi)?;
            let mut r = match self.kind {
                ProblemKind::Source => {
                    let mut r = self.k_free.mul_vec(&phi_free)?;
                    let mb = self.mass_rows.mul_vec(&it.param)?;
                    linalg::axpy(-1.0, &mb, &mut r);
                    r
                }
                ProblemKind::Potential => {
                    let mut r = self.k_free.mul_vec(&phi_free)?;
                    let mc = restrict_to_free(mesh, &assemble_weighted_mass(mesh, &it.param)?.mul_vec(phi)?)?;
                    linalg::axpy(1.0, &mc, &mut r);
                    r
                }
                ProblemKind::Diffusion => {
                    restrict_to_free(mesh, &assemble_stiffness(mesh, &it.param)?.mul_vec(phi)?)?
                }
            };
            linalg::axpy(-1.0, g, &mut r);
            out.push(r);
        }
        Ok(out)
    }

    /// J = ½ Σᵢ rᵢᵀ K⁻¹ rᵢ.
    pub fn cost(&self, it: &GnIterate) -> Result<f64> {
        let mut j = 0.0;
        for r in self.residuals(it)? {
            j += 0.5 * fem2d::vstar_norm_sq(&r, &self.k_fact)?;
        }
        Ok(j)
    }

    /// Cell-coupling matrix of the linearized problem (free rows).
    pub(crate) fn coupling(&self, phi: &[f64]) -> Result<CsrMatrix> {
        let full = match self.kind {
            ProblemKind::Source => unreachable!("source residual is already linear"),
            ProblemKind::Potential => assemble_cell_coupling_mass(&self.mesh, phi)?,
            ProblemKind::Diffusion => fem2d::assemble_cell_coupling_stiffness(&self.mesh, phi)?,
        };
        Ok(restrict_rows_to_free(&self.mesh, &full)?)
    }
}

fn check(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(GnError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Parameter discretization per kind.
impl ProblemKind {
    pub fn param_kind(self) -> FieldKind {
        match self {
            Self::Source => FieldKind::P1,
            Self::Potential | Self::Diffusion => FieldKind::P0,
        }
    }
}

/// Evaluates the cost of an iterate.
pub fn cost_eval(problem: &InverseProblem, it: &GnIterate) -> Result<f64> {
    problem.cost(it)
}
