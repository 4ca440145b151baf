use super::{ActivePair, BoxQP, Result};

/// A QP in the variables left free after fixing some indices at bounds.
#[derive(Debug, Clone)]
pub struct FixedSubproblem {
    pub qp: BoxQP,
    /// `free[k]` is the full-problem index of subproblem variable k.
    pub free: Vec<usize>,
    /// Full-length vector holding the fixed values (zeros elsewhere).
    template: Vec<f64>,
}

impl FixedSubproblem {
    /// Re-embeds a subproblem vector into full coordinates.
    pub fn embed(&self, x_sub: &[f64]) -> Vec<f64> {
        let mut x = self.template.clone();
        for (k, &i) in self.free.iter().enumerate() {
            x[i] = x_sub[k];
        }
        x
    }
}

/// Fixes `x[a0] = u[a0]` and `x[c0] = ℓ[c0]` and condenses the remaining QP;
/// the linear term absorbs the coupling to the fixed values and the constant
/// term is dropped.
pub fn fix_subproblem(qp: &BoxQP, a0: &[usize], c0: &[usize]) -> Result<FixedSubproblem> {
    let pair = ActivePair::new(a0.to_vec(), c0.to_vec());
    pair.validate(qp)?;
    let n = qp.n();
    let mut template = vec![0.0; n];
    for &i in &pair.upper {
        template[i] = qp.upper()[i];
    }
    for &i in &pair.lower {
        template[i] = qp.lower()[i];
    }
    let free = pair.inactive(n);
    let g = qp.gradient(&template)?;
    let sub = BoxQP::new(
        qp.hessian().restrict(&free)?,
        free.iter().map(|&i| g[i]).collect(),
        free.iter().map(|&i| qp.lower()[i]).collect(),
        free.iter().map(|&i| qp.upper()[i]).collect(),
    )?
    .with_absolute_shift(qp.shift());
    Ok(FixedSubproblem {
        qp: sub,
        free,
        template,
    })
}
