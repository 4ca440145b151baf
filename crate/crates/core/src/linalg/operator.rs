use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_len, dot, Result, SymMatrix};

type ApplyFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Matrix-free symmetric operator.
#[derive(Clone)]
pub struct LinearOperator {
    dim: usize,
    apply: Arc<ApplyFn>,
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOperator").field("dim", &self.dim).finish()
    }
}

impl LinearOperator {
    pub fn new(dim: usize, apply: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            apply: Arc::new(apply),
        }
    }

    pub fn from_matrix(m: SymMatrix) -> Self {
        let dim = m.dim();
        Self::new(dim, move |x| m.mul_vec(x).expect("dimension checked by caller"))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        Ok((self.apply)(x))
    }

    /// Largest relative asymmetry |⟨Mu,v⟩ − ⟨u,Mv⟩| / (‖Mu‖‖v‖ + ‖u‖‖Mv‖)
    /// over `probes` random vector pairs.
    pub fn symmetry_defect(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let u: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mu = (self.apply)(&u);
            let mv = (self.apply)(&v);
            let scale = dot(&mu, &mu).sqrt() * dot(&v, &v).sqrt()
                + dot(&u, &u).sqrt() * dot(&mv, &mv).sqrt();
            if scale > 0.0 {
                worst = worst.max((dot(&mu, &v) - dot(&u, &mv)).abs() / scale);
            }
        }
        worst
    }
}
