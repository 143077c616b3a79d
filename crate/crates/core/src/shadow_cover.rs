//! Greedy hitting set of eps-shadows.
//!
//! The eps-shadow of a direction `v` over `Pin` is the outer supporting
//! halfspace of `Pin` with normal `v`, moved inward by `eps`. Any subset of
//! `Pout` whose hull is eps-close to `Pin` must put a point in every shadow.
//! The greedy loop tracks the input points still farther than
//! `(1 + delta) * eps` from the current hull ("unhappy"), forms the shadow of
//! each one's direction to its warm nearest hull point, and adds the output
//! candidate that lies in the most shadows. Every point whose shadow was hit
//! moves its nearest point along the segment toward the new candidate.

use rayon::prelude::*;

use crate::caratheodory::Code;
use crate::combination::SparseCombination;
use crate::error::{check_eps, Error, Result};
use crate::geometry::{diameter_2approx, dist_sq, dot, normalize_to_unit_ball, BallTransform, DotAccess, PointSet};
use crate::greedy_hull::{HullApproximation, RunStats};

/// Constant in the per-point hit budget `ceil(16 / (eps * delta)^2)`.
pub const HIT_CONSTANT: f64 = 16.0;

const UNIT_BALL_SLACK: f64 = 1e-9;

/// Halfspace `{x : <x, v> >= max_{p in Pin} <p, v> - eps}` for unit `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowQuery {
    direction: Vec<f64>,
    threshold: f64,
}

impl ShadowQuery {
    pub fn new(pin: &PointSet, v: &[f64], eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::EpsOutOfRange(eps));
        }
        if v.len() != pin.dim() {
            return Err(Error::DimensionMismatch { expected: pin.dim(), found: v.len() });
        }
        let len = dot(v, v).sqrt();
        if !(len > 0.0) {
            return Err(Error::ZeroDirection);
        }
        let direction: Vec<f64> = v.iter().map(|x| x / len).collect();
        let top = pin.rows().map(|p| dot(p, &direction)).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { direction, threshold: top - eps })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        dot(p, &self.direction) >= self.threshold
    }
}

/// Whether `p` lies in the eps-shadow of `v` over `pin`.
pub fn shadow_contains(pin: &PointSet, eps: f64, v: &[f64], p: &[f64]) -> Result<bool> {
    if p.len() != pin.dim() {
        return Err(Error::DimensionMismatch { expected: pin.dim(), found: p.len() });
    }
    Ok(ShadowQuery::new(pin, v, eps)?.contains(p))
}

/// Per input point bookkeeping.
#[derive(Debug, Clone)]
struct Tracked {
    point: usize,
    /// Weights over the selection, in selection order.
    weights: Vec<f64>,
    qa: f64,
    aa: f64,
    dist_sq: f64,
    unhappy: bool,
    hits: usize,
}

/// State of the greedy cover loop.
#[derive(Debug, Clone)]
pub struct CoverState<'a> {
    acc: DotAccess<'a>,
    pin: Vec<usize>,
    pout: Vec<usize>,
    eps: f64,
    delta: f64,
    selected: Vec<usize>,
    /// `columns[s][x] = <selected[s], p_x>` for every point `x`.
    columns: Vec<Vec<f64>>,
    tracked: Vec<Tracked>,
    radii: Vec<f64>,
    iterations: usize,
}

impl<'a> CoverState<'a> {
    /// `pin` and `pout` index points of `acc`, which must lie in the unit ball.
    /// The selection starts with the output candidate nearest the first input point.
    pub fn new(acc: DotAccess<'a>, pin: &[usize], pout: &[usize], eps: f64, delta: f64) -> Result<Self> {
        check_eps(eps)?;
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        if pin.is_empty() || pout.is_empty() {
            return Err(Error::EmptySelection);
        }
        for &i in pin.iter().chain(pout) {
            acc.check_index(i)?;
            if acc.norm_sq(i) > (1.0 + UNIT_BALL_SLACK).powi(2) {
                return Err(Error::InvalidParameter(format!(
                    "point {i} lies outside the unit ball; normalize the input first"
                )));
            }
        }
        let first = pin[0];
        let mut start = pout[0];
        for &p in pout {
            let (d, best) = (acc.dist_sq(first, p), acc.dist_sq(first, start));
            if d < best || (d == best && p < start) {
                start = p;
            }
        }
        let start_col = column(&acc, start);
        let happy_sq = ((1.0 + delta) * eps).powi(2);
        let tracked = pin
            .iter()
            .map(|&q| {
                let (qa, aa) = (start_col[q], acc.norm_sq(start));
                let dist_sq = (acc.norm_sq(q) - 2.0 * qa + aa).max(0.0);
                Tracked { point: q, weights: vec![1.0], qa, aa, dist_sq, unhappy: dist_sq >= happy_sq, hits: 0 }
            })
            .collect();
        Ok(Self {
            acc,
            pin: pin.to_vec(),
            pout: pout.to_vec(),
            eps,
            delta,
            selected: vec![start],
            columns: vec![start_col],
            tracked,
            radii: Vec::new(),
            iterations: 0,
        })
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn unhappy_count(&self) -> usize {
        self.tracked.iter().filter(|t| t.unhappy).count()
    }

    /// Tracked distance of each input point to its warm nearest hull point.
    pub fn distances(&self) -> Vec<f64> {
        self.tracked.iter().map(|t| t.dist_sq.sqrt()).collect()
    }

    pub fn hits(&self) -> Vec<usize> {
        self.tracked.iter().map(|t| t.hits).collect()
    }

    pub fn unhappy_flags(&self) -> Vec<bool> {
        self.tracked.iter().map(|t| t.unhappy).collect()
    }

    /// Warm nearest hull point of each input point.
    pub fn anns(&self) -> Vec<SparseCombination> {
        self.tracked
            .iter()
            .map(|t| SparseCombination::from_dense(&self.selected[..t.weights.len()], &t.weights))
            .collect()
    }

    /// `ceil(16 / (eps * delta)^2)`.
    pub fn hit_budget(&self) -> usize {
        (HIT_CONSTANT / (self.eps * self.delta).powi(2)).ceil() as usize
    }

    fn happy_sq(&self) -> f64 {
        ((1.0 + self.delta) * self.eps).powi(2)
    }

    /// `<p_x, q - a(q)>` for tracked point `t`.
    fn score(&self, t: &Tracked, x: usize) -> f64 {
        let mut s = self.acc.dot(t.point, x);
        for (w, col) in t.weights.iter().zip(&self.columns) {
            if *w != 0.0 {
                s -= w * col[x];
            }
        }
        s
    }

    /// Positions in `pout` inside the eps-shadow of `q - a(q)` over `pin`.
    fn shadow_members(&self, t: &Tracked) -> Vec<usize> {
        let len = t.dist_sq.sqrt();
        let top = self.pin.iter().map(|&x| self.score(t, x)).fold(f64::NEG_INFINITY, f64::max);
        let cut = top - self.eps * len;
        (0..self.pout.len()).filter(|&k| self.score(t, self.pout[k]) >= cut).collect()
    }

    /// One greedy round. Returns `Ok(false)` once every input point is happy.
    pub fn step(&mut self) -> Result<bool> {
        let unhappy: Vec<usize> = (0..self.tracked.len()).filter(|&k| self.tracked[k].unhappy).collect();
        if unhappy.is_empty() {
            return Ok(false);
        }
        let radius = unhappy.iter().map(|&k| self.tracked[k].dist_sq.sqrt()).fold(0.0, f64::max);

        let shadows: Vec<Vec<usize>> = unhappy.par_iter().map(|&k| self.shadow_members(&self.tracked[k])).collect();
        if let Some(pos) = shadows.iter().position(Vec::is_empty) {
            return Err(Error::NoApproximation { point: self.tracked[unhappy[pos]].point });
        }
        let mut counts = vec![0usize; self.pout.len()];
        for members in &shadows {
            for &k in members {
                counts[k] += 1;
            }
        }
        let mut best = 0;
        for k in 1..self.pout.len() {
            if counts[k] > counts[best] || (counts[k] == counts[best] && self.pout[k] < self.pout[best]) {
                best = k;
            }
        }
        let chosen = self.pout[best];
        let slot = match self.selected.iter().position(|&s| s == chosen) {
            Some(s) => s,
            None => {
                self.selected.push(chosen);
                self.columns.push(column(&self.acc, chosen));
                self.selected.len() - 1
            }
        };

        let happy_sq = self.happy_sq();
        for (members, &k) in shadows.iter().zip(&unhappy) {
            if members.binary_search(&best).is_ok() {
                self.segment_update(k, slot);
                let t = &mut self.tracked[k];
                t.hits += 1;
                t.unhappy = t.dist_sq >= happy_sq;
            }
        }
        self.radii.push(radius);
        self.iterations += 1;
        Ok(true)
    }

    /// Moves `a(q)` to the point of `[a(q), selected[slot]]` nearest to `q`.
    fn segment_update(&mut self, k: usize, slot: usize) {
        let p = self.selected[slot];
        let col = &self.columns[slot];
        let t = &mut self.tracked[k];
        t.weights.resize(slot.max(t.weights.len() - 1) + 1, 0.0);
        let pa: f64 = t.weights.iter().zip(&self.selected).map(|(w, &s)| w * col[s]).sum();
        let pq = col[t.point];
        let pp = self.acc.norm_sq(p);
        let gap = (pq - pa) - (t.qa - t.aa);
        let h = pp - 2.0 * pa + t.aa;
        if gap <= 0.0 || h <= 0.0 {
            return;
        }
        let step = (gap / h).min(1.0);
        let keep = 1.0 - step;
        for w in t.weights.iter_mut() {
            *w *= keep;
        }
        t.weights[slot] += step;
        t.qa = keep * t.qa + step * pq;
        t.aa = keep * keep * t.aa + 2.0 * step * keep * pa + step * step * pp;
        t.dist_sq = match self.acc.coords() {
            Some(ps) => {
                let mut a = vec![0.0; ps.dim()];
                for (w, &s) in t.weights.iter().zip(&self.selected) {
                    if *w != 0.0 {
                        a.iter_mut().zip(ps.point(s)).for_each(|(x, y)| *x += w * y);
                    }
                }
                dist_sq(ps.point(t.point), &a)
            }
            None => (t.dist_sq - step * (2.0 * gap - step * h)).max(0.0),
        };
    }

    /// Runs until every input point is happy.
    pub fn run(mut self) -> Result<HullApproximation> {
        while self.step()? {}
        Ok(self.finish())
    }

    pub fn finish(self) -> HullApproximation {
        let codes = self
            .tracked
            .iter()
            .map(|t| Code {
                point: t.point,
                support: SparseCombination::from_dense(&self.selected[..t.weights.len()], &t.weights),
                dist: t.dist_sq.sqrt(),
            })
            .collect();
        let stats = RunStats {
            iterations: self.iterations,
            distance_queries: 0,
            descent_steps: self.tracked.iter().map(|t| t.hits as u64).sum(),
            warm_extra: Vec::new(),
            hits: self.tracked.iter().map(|t| t.hits).collect(),
        };
        let bound = (1.0 + self.delta) * self.eps;
        HullApproximation {
            selected: self.selected,
            radii: self.radii,
            threshold: bound,
            achieved_bound: bound,
            diam_estimate: diameter_2approx(&self.acc),
            codes: Some(codes),
            stats,
        }
    }
}

fn column(acc: &DotAccess, j: usize) -> Vec<f64> {
    (0..acc.len()).map(|i| acc.dot(i, j)).collect()
}

/// Greedy cover of the input points `pin` by hulls of output candidates `pout`.
///
/// On success every input point lies within `(1 + delta) * eps` of the hull
/// of the selection. Fails with [`Error::NoApproximation`] when some shadow
/// contains no candidate.
pub fn greedy_cover(acc: &DotAccess, pin: &[usize], pout: &[usize], eps: f64, delta: f64) -> Result<HullApproximation> {
    CoverState::new(*acc, pin, pout, eps, delta)?.run()
}

/// Normalizes `pin` and `pout` jointly into the unit ball and runs
/// [`greedy_cover`]. Selected indices refer to rows of `pout`; code point
/// indices refer to rows of `pin`.
pub fn greedy_cover_sets(pin: &PointSet, pout: &PointSet, eps: f64, delta: f64) -> Result<(HullApproximation, BallTransform)> {
    let joint = pin.concat(pout)?;
    let (normalized, transform) = normalize_to_unit_ball(&joint.to_rows())?;
    let n_in = pin.len();
    let in_idx: Vec<usize> = (0..n_in).collect();
    let out_idx: Vec<usize> = (n_in..joint.len()).collect();
    let mut approx = greedy_cover(&DotAccess::from(&normalized), &in_idx, &out_idx, eps, delta)?;
    for s in &mut approx.selected {
        *s -= n_in;
    }
    if let Some(codes) = approx.codes.as_mut() {
        for c in codes.iter_mut() {
            let shifted = c.support.entries().iter().map(|&(i, w)| (i - n_in, w)).collect();
            c.support = SparseCombination::new(shifted)?;
        }
    }
    Ok((approx, transform))
}
