//! Approximate projection onto a convex hull as a sparse convex combination,
//! an exact face-enumeration oracle for testing, and whole-dataset encoding.

mod descent;
pub mod oracle;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combination::SparseCombination;
use crate::error::{check_eps, Error, Result};
use crate::geometry::{diameter_2approx, dist_sq, DotAccess, Query};

pub(crate) use descent::{segment_descent, CandidateGram, DenseGram, Descent};
pub use descent::{iteration_budget, StopReason, SPARSITY_CONSTANT};
pub use oracle::{exact_project_oracle, exact_project_oracle_among, OracleProjection};

/// Outcome of [`approx_project`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// The returned point `a`, as a combination of dataset points.
    pub point: SparseCombination,
    /// `|q - a|`, recomputed from `point`.
    pub distance: f64,
    /// Segment steps taken after initialization.
    pub iterations: usize,
    pub converged_by: StopReason,
    /// Distances `|q - a_i|` along the run, starting with the initial point.
    pub trace: Vec<f64>,
}

/// Sparse code of one dataset point over a selected subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Code {
    pub point: usize,
    pub support: SparseCombination,
    pub dist: f64,
}

/// Candidate gram answered by a [`DotAccess`], caching the columns it computes.
struct AccessGram<'a, 'b> {
    acc: &'b DotAccess<'a>,
    candidates: &'b [usize],
    cache: HashMap<usize, Vec<f64>>,
}

impl CandidateGram for AccessGram<'_, '_> {
    fn len(&self) -> usize {
        self.candidates.len()
    }

    fn diag(&self, k: usize) -> f64 {
        self.acc.norm_sq(self.candidates[k])
    }

    fn column(&mut self, j: usize) -> &[f64] {
        let (acc, cands) = (self.acc, self.candidates);
        self.cache
            .entry(j)
            .or_insert_with(|| cands.iter().map(|&c| acc.dot(c, cands[j])).collect())
    }
}

/// Projects `query` approximately onto the hull of all dataset points.
///
/// The result satisfies `|q - a| <= dist(q, conv P) + eps * diam_hint`
/// whenever `diam_hint >= diam(P)`.
pub fn approx_project(acc: &DotAccess, query: Query, eps: f64, diam_hint: f64) -> Result<ProjectionResult> {
    let all: Vec<usize> = (0..acc.len()).collect();
    approx_project_among(acc, &all, query, eps, diam_hint, None)
}

/// Projects `query` onto the hull of the `candidates`, optionally starting
/// from a warm combination over a subset of them.
pub fn approx_project_among(
    acc: &DotAccess,
    candidates: &[usize],
    query: Query,
    eps: f64,
    diam_hint: f64,
    warm: Option<&SparseCombination>,
) -> Result<ProjectionResult> {
    check_eps(eps)?;
    if !(diam_hint >= 0.0 && diam_hint.is_finite()) {
        return Err(Error::InvalidParameter(format!("diam_hint must be finite and >= 0, got {diam_hint}")));
    }
    if candidates.is_empty() {
        return Err(Error::EmptySelection);
    }
    for &c in candidates {
        acc.check_index(c)?;
    }
    query.validate(acc)?;

    let start = match warm {
        None => None,
        Some(w) => {
            let pos: HashMap<usize, usize> = candidates.iter().enumerate().map(|(k, &c)| (c, k)).collect();
            let mut dense = vec![0.0; candidates.len()];
            for &(i, weight) in w.entries() {
                let k = *pos.get(&i).ok_or_else(|| {
                    Error::InvalidCombination(format!("warm start uses index {i} outside the candidates"))
                })?;
                dense[k] = weight;
            }
            Some(dense)
        }
    };

    let qq = query.norm_sq(acc);
    let qs: Vec<f64> = candidates.iter().map(|&c| query.dot_point(acc, c)).collect();
    let mut gram = AccessGram { acc, candidates, cache: HashMap::new() };
    let run = segment_descent(&mut gram, qq, &qs, start, eps * diam_hint, iteration_budget(eps), true);

    let point = SparseCombination::from_dense(candidates, &run.weights);
    let distance = distance_to(acc, &query, &point);
    Ok(ProjectionResult { point, distance, iterations: run.steps, converged_by: run.stop, trace: run.trace })
}

/// `|q - a|`: from coordinates when available, otherwise from the gram
/// quadratic form.
pub fn distance_to(acc: &DotAccess, query: &Query, a: &SparseCombination) -> f64 {
    match acc.coords() {
        Some(ps) => dist_sq(&query.to_vector(ps), &a.evaluate(ps)).sqrt(),
        None => {
            let qa: f64 = a.entries().iter().map(|&(i, w)| w * query.dot_point(acc, i)).sum();
            (query.norm_sq(acc) - 2.0 * qa + a.norm_sq(acc)).max(0.0).sqrt()
        }
    }
}

/// Encodes every dataset point as a sparse combination of the `selected` points.
///
/// Uses `diameter_2approx` of the whole set as the accuracy scale, so each
/// code lies within `dist(p, conv T) + eps * diam'` of its point.
pub fn encode_dataset(acc: &DotAccess, selected: &[usize], eps: f64) -> Result<Vec<Code>> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    check_eps(eps)?;
    for &s in selected {
        acc.check_index(s)?;
    }
    let diam = diameter_2approx(acc);
    (0..acc.len())
        .into_par_iter()
        .map(|i| {
            let r = approx_project_among(acc, selected, Query::Point(i), eps, diam, None)?;
            Ok(Code { point: i, support: r.point, dist: r.distance })
        })
        .collect()
}
