use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::{BoxQP, QpError, Result};

/// Per-index membership in an active pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Status {
    Free,
    Upper,
    Lower,
}

/// Disjoint index sets: `upper` (𝒜, fixed at u) and `lower` (𝒞, fixed at ℓ).
/// The complement is the inactive set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ActivePair {
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
}

impl ActivePair {
    pub fn new(mut upper: Vec<usize>, mut lower: Vec<usize>) -> Self {
        upper.sort_unstable();
        upper.dedup();
        lower.sort_unstable();
        lower.dedup();
        Self { upper, lower }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Every index with a finite lower bound placed in 𝒞 (cold start).
    pub fn all_lower(qp: &BoxQP) -> Self {
        let lower = (0..qp.n()).filter(|&i| qp.lower()[i].is_finite()).collect();
        Self { upper: Vec::new(), lower }
    }

    pub fn len(&self) -> usize {
        self.upper.len() + self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inactive indices in increasing order.
    pub fn inactive(&self, n: usize) -> Vec<usize> {
        let mut mark = vec![true; n];
        for &i in self.upper.iter().chain(&self.lower) {
            if i < n {
                mark[i] = false;
            }
        }
        (0..n).filter(|&i| mark[i]).collect()
    }

    /// Checks disjointness, range, and that fixed bounds are finite.
    pub fn validate(&self, qp: &BoxQP) -> Result<()> {
        self.to_status(qp).map(|_| ())
    }

    pub(crate) fn to_status(&self, qp: &BoxQP) -> Result<Vec<Status>> {
        let n = qp.n();
        let mut st = vec![Status::Free; n];
        for &i in &self.upper {
            if i >= n {
                return Err(QpError::InvalidPair(format!("index {i} out of range")));
            }
            if !qp.upper()[i].is_finite() {
                return Err(QpError::InvalidPair(format!("index {i} has no finite upper bound")));
            }
            st[i] = Status::Upper;
        }
        for &i in &self.lower {
            if i >= n {
                return Err(QpError::InvalidPair(format!("index {i} out of range")));
            }
            if st[i] != Status::Free {
                return Err(QpError::InvalidPair(format!("index {i} in both sets")));
            }
            if !qp.lower()[i].is_finite() {
                return Err(QpError::InvalidPair(format!("index {i} has no finite lower bound")));
            }
            st[i] = Status::Lower;
        }
        Ok(st)
    }

    pub(crate) fn from_status(st: &[Status]) -> Self {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (i, s) in st.iter().enumerate() {
            match s {
                Status::Upper => upper.push(i),
                Status::Lower => lower.push(i),
                Status::Free => {}
            }
        }
        Self { upper, lower }
    }

    /// `self ⊇ other` componentwise.
    pub fn contains(&self, other: &ActivePair) -> bool {
        other.upper.iter().all(|i| self.upper.binary_search(i).is_ok())
            && other.lower.iter().all(|i| self.lower.binary_search(i).is_ok())
    }
}

pub(crate) fn status_hash(st: &[Status]) -> u64 {
    let mut h = DefaultHasher::new();
    st.hash(&mut h);
    h.finish()
}
