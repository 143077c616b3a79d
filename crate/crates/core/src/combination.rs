use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DotAccess, PointSet};

/// Weights below this are dropped when a combination is tidied.
pub const PRUNE_BELOW: f64 = 1e-14;

const NEG_WEIGHT_TOL: f64 = -1e-12;
const SUM_TOL: f64 = 1e-9;

/// Convex combination of dataset points: distinct indices, non-negative
/// weights summing to one. Serialized as `[[index, weight], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, f64)>", into = "Vec<(usize, f64)>")]
pub struct SparseCombination {
    entries: Vec<(usize, f64)>,
}

impl SparseCombination {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidCombination("no entries".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        let mut sum = 0.0;
        for &(i, w) in &entries {
            if !seen.insert(i) {
                return Err(Error::InvalidCombination(format!("duplicate index {i}")));
            }
            if !w.is_finite() || w < NEG_WEIGHT_TOL {
                return Err(Error::InvalidCombination(format!("weight {w} at index {i}")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidCombination(format!("weights sum to {sum}")));
        }
        Ok(Self { entries })
    }

    pub fn singleton(i: usize) -> Self {
        Self { entries: vec![(i, 1.0)] }
    }

    /// Builds a combination from dense weights over `indices`, pruning tiny
    /// weights and renormalizing.
    pub(crate) fn from_dense(indices: &[usize], weights: &[f64]) -> Self {
        let mut entries: Vec<(usize, f64)> = indices
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w > PRUNE_BELOW)
            .map(|(&i, &w)| (i, w))
            .collect();
        if entries.is_empty() {
            // all mass pruned away can only happen through round-off; keep the heaviest
            let (k, _) = weights
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (k, &w)| if w > b.1 { (k, w) } else { b });
            return Self::singleton(indices[k]);
        }
        let sum: f64 = entries.iter().map(|e| e.1).sum();
        for e in &mut entries {
            e.1 /= sum;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn weight_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub(crate) fn check_indices(&self, n: usize) -> Result<()> {
        match self.entries.iter().find(|e| e.0 >= n) {
            Some(&(index, _)) => Err(Error::IndexOutOfRange { index, len: n }),
            None => Ok(()),
        }
    }

    /// Coordinates of the combined point.
    pub fn evaluate(&self, ps: &PointSet) -> Vec<f64> {
        let mut out = vec![0.0; ps.dim()];
        for &(i, w) in &self.entries {
            for (o, x) in out.iter_mut().zip(ps.point(i)) {
                *o += w * x;
            }
        }
        out
    }

    /// `<a, p_i>`.
    pub fn dot_point(&self, acc: &DotAccess, i: usize) -> f64 {
        self.entries.iter().map(|&(j, w)| w * acc.dot(j, i)).sum()
    }

    /// `|a|^2` through dot products.
    pub fn norm_sq(&self, acc: &DotAccess) -> f64 {
        let mut s = 0.0;
        for &(i, wi) in &self.entries {
            for &(j, wj) in &self.entries {
                s += wi * wj * acc.dot(i, j);
            }
        }
        s
    }
}

impl TryFrom<Vec<(usize, f64)>> for SparseCombination {
    type Error = Error;

    fn try_from(entries: Vec<(usize, f64)>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<SparseCombination> for Vec<(usize, f64)> {
    fn from(c: SparseCombination) -> Self {
        c.entries
    }
}
