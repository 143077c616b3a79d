//! Greedy farthest-point hull coresets.
//!
//! Starting from an extreme vertex, the point farthest from the hull of the
//! current selection is added until every point lies within
//! `delta * diam' / 2` of that hull, where `delta = 8 * eps^(1/3)` and
//! `diam'` is the linear-scan diameter estimate. Distances are
//! `eps * diam'`-approximate: each point keeps a warm-started sparse
//! combination of the selection as its approximate nearest hull point.
//!
//! Two engines share this contract. The naive engine reruns the segment
//! descent in the full inner-product space every round. The fast engine keeps
//! an orthonormal basis of the selection's span and runs the descent on
//! in-span coordinates, recovering full distances by Pythagoras.

mod subspace;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caratheodory::{iteration_budget, segment_descent, Code, DenseGram, Descent};
use crate::combination::SparseCombination;
use crate::error::{check_eps, Error, Result};
use crate::geometry::{diameter_2approx, dot, DotAccess};

pub use subspace::SubspaceState;

/// Span tolerance relative to the diameter estimate.
pub const SPAN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Naive,
    #[default]
    Fast,
}

/// Counters collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Rounds of the main loop.
    pub iterations: usize,
    /// Point-to-hull distance evaluations.
    pub distance_queries: u64,
    /// Segment steps across all descents.
    pub descent_steps: u64,
    /// Fast engine: per point, total warm-start descent steps.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warm_extra: Vec<usize>,
    /// Cover: per input point, number of times it was hit.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub hits: Vec<usize>,
}

/// Selected subset with its radii trace, per-point codes and statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullApproximation {
    /// Point indices in selection order.
    pub selected: Vec<usize>,
    /// Approximate distance of each accepted point (after the first) to the
    /// hull of the points selected before it.
    pub radii: Vec<f64>,
    /// Stopping threshold on approximate distances.
    pub threshold: f64,
    /// Guaranteed one-sided Hausdorff bound.
    pub achieved_bound: f64,
    /// Diameter estimate in `[diam, 2 * diam]`.
    pub diam_estimate: f64,
    pub codes: Option<Vec<Code>>,
    pub stats: RunStats,
}

/// `8 * eps^(1/3)`.
pub fn cluster_delta(eps: f64) -> f64 {
    8.0 * eps.cbrt()
}

pub fn greedy_cluster(acc: &DotAccess, eps: f64, engine: Engine) -> Result<HullApproximation> {
    match engine {
        Engine::Naive => greedy_cluster_naive(acc, eps),
        Engine::Fast => greedy_cluster_fast(acc, eps),
    }
}

struct Setup {
    diam: f64,
    threshold: f64,
    tol: f64,
    budget: usize,
    start: usize,
}

fn setup(acc: &DotAccess, eps: f64) -> Result<Setup> {
    check_eps(eps)?;
    if acc.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diam = diameter_2approx(acc);
    Ok(Setup {
        diam,
        threshold: cluster_delta(eps) * diam / 2.0,
        tol: eps * diam,
        budget: iteration_budget(eps),
        start: start_vertex(acc),
    })
}

/// The point farthest from point 0: it lies on a ball around point 0 that
/// contains the whole set, so it is a vertex of the hull.
fn start_vertex(acc: &DotAccess) -> usize {
    let mut best = 0;
    let mut best_d = 0.0;
    for j in 0..acc.len() {
        let d = acc.dist_sq(0, j);
        if d > best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    (best, values[best])
}

fn codes_from(selected: &[usize], anns: &[Vec<f64>], dists: &[f64]) -> Vec<Code> {
    anns.iter()
        .zip(dists)
        .enumerate()
        .map(|(i, (w, &dist))| Code { point: i, support: SparseCombination::from_dense(selected, w), dist })
        .collect()
}

fn finish(
    eps: f64,
    s: &Setup,
    selected: Vec<usize>,
    radii: Vec<f64>,
    anns: &[Vec<f64>],
    dists: &[f64],
    stats: RunStats,
) -> HullApproximation {
    let codes = codes_from(&selected, anns, dists);
    HullApproximation {
        selected,
        radii,
        threshold: s.threshold,
        achieved_bound: (cluster_delta(eps) + eps) * s.diam,
        diam_estimate: s.diam,
        codes: Some(codes),
        stats,
    }
}

/// Naive engine: every round reruns the descent for every point against the
/// whole selection, warm-started from the previous round's combination.
pub fn greedy_cluster_naive(acc: &DotAccess, eps: f64) -> Result<HullApproximation> {
    let s = setup(acc, eps)?;
    let n = acc.len();
    let mut selected = vec![s.start];
    let mut columns: Vec<Vec<f64>> = vec![column(acc, s.start)];
    let mut anns: Vec<Vec<f64>> = vec![vec![1.0]; n];
    let mut dists = vec![0.0; n];
    let mut radii = Vec::new();
    let mut stats = RunStats::default();

    loop {
        let m = selected.len();
        let sel_gram: Vec<Vec<f64>> = columns
            .iter()
            .map(|col| selected.iter().map(|&t| col[t]).collect())
            .collect();
        let runs: Vec<Descent> = (0..n)
            .into_par_iter()
            .map(|x| {
                let qs: Vec<f64> = columns.iter().map(|col| col[x]).collect();
                let mut start = anns[x].clone();
                start.resize(m, 0.0);
                segment_descent(&mut DenseGram { rows: &sel_gram }, acc.norm_sq(x), &qs, Some(start), s.tol, s.budget, false)
            })
            .collect();
        for (x, run) in runs.into_iter().enumerate() {
            stats.descent_steps += run.steps as u64;
            dists[x] = run.dist_sq.sqrt();
            anns[x] = run.weights;
        }
        stats.distance_queries += n as u64;
        stats.iterations += 1;

        let (far, r) = argmax(&dists);
        if r <= s.threshold || selected.contains(&far) {
            break;
        }
        selected.push(far);
        radii.push(r);
        columns.push(column(acc, far));
    }
    Ok(finish(eps, &s, selected, radii, &anns, &dists, stats))
}

fn column(acc: &DotAccess, j: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(acc.len());
    acc.column_into(j, &mut out);
    out
}

/// Warm approximate nearest hull point of one point, kept by the fast engine.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmAnn {
    /// Weights over the selection, in selection order.
    pub weights: Vec<f64>,
    /// Full-space distance from the point to the combination.
    pub dist: f64,
}

impl WarmAnn {
    pub fn combination(&self, selected: &[usize]) -> SparseCombination {
        SparseCombination::from_dense(selected, &self.weights)
    }
}

/// Gram of the selected points in span coordinates.
pub fn span_gram(state: &SubspaceState, selected: &[usize]) -> Vec<Vec<f64>> {
    selected
        .iter()
        .map(|&a| selected.iter().map(|&b| dot(state.coords(a), state.coords(b))).collect())
        .collect()
}

/// Refreshes the warm nearest point of `point` after the selection grew.
///
/// The descent runs on in-span coordinates starting from the previous
/// combination (padded with zero weight for new selections); the returned
/// distance combines the in-span distance with the point's distance to the
/// span. Also returns the number of descent steps taken.
pub fn update_ann_warm(
    state: &SubspaceState,
    selected: &[usize],
    point: usize,
    previous: &WarmAnn,
    eps: f64,
    diam_hint: f64,
) -> Result<(WarmAnn, usize)> {
    check_eps(eps)?;
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    if previous.weights.len() > selected.len() {
        return Err(Error::InvalidParameter("warm weights longer than the selection".into()));
    }
    let gram = span_gram(state, selected);
    Ok(warm_update(state, selected, &gram, point, &previous.weights, eps * diam_hint, iteration_budget(eps)))
}

fn warm_update(
    state: &SubspaceState,
    selected: &[usize],
    gram: &[Vec<f64>],
    point: usize,
    previous: &[f64],
    tol: f64,
    budget: usize,
) -> (WarmAnn, usize) {
    let own = state.coords(point);
    let qs: Vec<f64> = selected.iter().map(|&t| dot(own, state.coords(t))).collect();
    let mut start = previous.to_vec();
    start.resize(selected.len(), 0.0);
    let run = segment_descent(&mut DenseGram { rows: gram }, dot(own, own), &qs, Some(start), tol, budget, false);
    let dist = (state.resid_sq(point) + run.dist_sq).sqrt();
    (WarmAnn { weights: run.weights, dist }, run.steps)
}

/// Fast engine.
pub fn greedy_cluster_fast(acc: &DotAccess, eps: f64) -> Result<HullApproximation> {
    greedy_cluster_fast_observed(acc, eps, |_, _| {})
}

/// Fast engine with a callback invoked after every basis extension attempt,
/// receiving the subspace state and the current selection.
pub fn greedy_cluster_fast_observed<F>(acc: &DotAccess, eps: f64, mut observe: F) -> Result<HullApproximation>
where
    F: FnMut(&SubspaceState, &[usize]),
{
    let s = setup(acc, eps)?;
    let n = acc.len();
    let mut state = SubspaceState::new(acc, SPAN_TOLERANCE * s.diam);
    let mut selected = vec![s.start];
    state.extend(acc, s.start)?;
    observe(&state, &selected);

    let mut anns: Vec<Vec<f64>> = vec![vec![1.0]; n];
    let mut dists = vec![0.0; n];
    let mut extra = vec![0usize; n];
    let mut radii = Vec::new();
    let mut stats = RunStats::default();

    loop {
        let gram = span_gram(&state, &selected);
        let updates: Vec<(WarmAnn, usize)> = (0..n)
            .into_par_iter()
            .map(|x| warm_update(&state, &selected, &gram, x, &anns[x], s.tol, s.budget))
            .collect();
        for (x, (ann, steps)) in updates.into_iter().enumerate() {
            extra[x] += steps;
            stats.descent_steps += steps as u64;
            dists[x] = ann.dist;
            anns[x] = ann.weights;
        }
        stats.distance_queries += n as u64;
        stats.iterations += 1;

        let (far, r) = argmax(&dists);
        if r <= s.threshold || selected.contains(&far) {
            break;
        }
        selected.push(far);
        radii.push(r);
        state.extend(acc, far)?;
        observe(&state, &selected);
    }
    stats.warm_extra = extra;
    Ok(finish(eps, &s, selected, radii, &anns, &dists, stats))
}
