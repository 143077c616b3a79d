//! Segment-projection descent toward a query point over a finite candidate set.
//!
//! Each step finds the candidate extremal in the direction `q - a`, then moves
//! `a` to the point of the segment `[a, p]` nearest to `q`. Everything is
//! phrased through inner products so the same loop serves explicit
//! coordinates, gram matrices and the in-span coordinates of the fast
//! clustering engine.

use serde::{Deserialize, Serialize};

use crate::combination::PRUNE_BELOW;

/// Support-size constant: a projection never uses more than `16 / eps^2` points.
pub const SPARSITY_CONSTANT: f64 = 16.0;

/// Why a descent run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Budget,
    GapCertificate,
}

/// Inner products among a fixed candidate list.
pub(crate) trait CandidateGram {
    fn len(&self) -> usize;
    fn diag(&self, k: usize) -> f64;
    /// `<c_k, c_j>` for every candidate `k`.
    fn column(&mut self, j: usize) -> &[f64];
}

/// Dense candidate gram held in memory.
pub(crate) struct DenseGram<'a> {
    pub rows: &'a [Vec<f64>],
}

impl CandidateGram for DenseGram<'_> {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn diag(&self, k: usize) -> f64 {
        self.rows[k][k]
    }

    fn column(&mut self, j: usize) -> &[f64] {
        &self.rows[j]
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Descent {
    /// Dense weights over the candidates.
    pub weights: Vec<f64>,
    /// Tracked squared distance `|q - a|^2`.
    pub dist_sq: f64,
    /// Number of segment steps taken.
    pub steps: usize,
    pub stop: StopReason,
    /// `|q - a_i|` before the first step and after every step.
    pub trace: Vec<f64>,
}

/// Iteration budget following the halving schedule `eps_j = 2^-(2+j)`: a
/// warm-up phase at `eps_0 = 1/4` followed by `4 / eps_j^2` steps per phase
/// until `eps_j <= eps`, capped so the support stays within `16 / eps^2`.
pub fn iteration_budget(eps: f64) -> usize {
    let mut phase_eps = 0.25_f64;
    // (1 / eps_0^2) * log2(1 / eps_0)
    let mut total = 32.0_f64;
    while phase_eps > eps {
        phase_eps *= 0.5;
        total += 4.0 / (phase_eps * phase_eps);
    }
    let cap = (SPARSITY_CONSTANT / (eps * eps)).ceil() - 1.0;
    let budget = total.min(cap).max(1.0);
    if budget >= usize::MAX as f64 {
        usize::MAX
    } else {
        budget as usize
    }
}

/// Runs the descent for a query given by `qq = <q, q>` and `qs[k] = <q, c_k>`.
///
/// `start` holds dense warm-start weights; without it the nearest candidate
/// is used. Stops when the projection of the extremal candidate onto
/// `[a, q]` lies within `tol` of `a`, or when `budget` steps were taken.
pub(crate) fn segment_descent<G: CandidateGram>(
    gram: &mut G,
    qq: f64,
    qs: &[f64],
    start: Option<Vec<f64>>,
    tol: f64,
    budget: usize,
    record_trace: bool,
) -> Descent {
    let m = gram.len();
    debug_assert_eq!(qs.len(), m);
    debug_assert!(m > 0);

    let mut weights = match start {
        Some(w) => {
            debug_assert_eq!(w.len(), m);
            w
        }
        None => {
            let mut best = 0;
            let mut best_val = gram.diag(0) - 2.0 * qs[0];
            for k in 1..m {
                let v = gram.diag(k) - 2.0 * qs[k];
                if v < best_val {
                    best = k;
                    best_val = v;
                }
            }
            let mut w = vec![0.0; m];
            w[best] = 1.0;
            w
        }
    };

    // ga[k] = <c_k, a>
    let mut ga = vec![0.0; m];
    for j in 0..m {
        let w = weights[j];
        if w != 0.0 {
            let col = gram.column(j);
            for (g, c) in ga.iter_mut().zip(col) {
                *g += w * c;
            }
        }
    }
    let mut qa: f64 = weights.iter().zip(qs).map(|(w, q)| w * q).sum();
    let mut aa: f64 = weights.iter().zip(&ga).map(|(w, g)| w * g).sum();
    let mut dist_sq = (qq - 2.0 * qa + aa).max(0.0);

    let mut trace = Vec::new();
    if record_trace {
        trace.push(dist_sq.sqrt());
    }

    let mut steps = 0;
    let stop = loop {
        if dist_sq <= 0.0 {
            break StopReason::GapCertificate;
        }
        let mut j = 0;
        let mut best = qs[0] - ga[0];
        for k in 1..m {
            let s = qs[k] - ga[k];
            if s > best {
                best = s;
                j = k;
            }
        }
        // <p_j - a, q - a>
        let gap = best - (qa - aa);
        let ell = dist_sq.sqrt();
        // distance from a to the projection of p_j onto [a, q]
        let lift = if gap <= 0.0 { 0.0 } else { (gap / ell).min(ell) };
        if lift <= tol {
            break StopReason::GapCertificate;
        }
        if steps >= budget {
            break StopReason::Budget;
        }
        let h = (gram.diag(j) - 2.0 * ga[j] + aa).max(0.0);
        if h <= 0.0 {
            break StopReason::GapCertificate;
        }
        let t = (gap / h).min(1.0);
        let s = 1.0 - t;

        let ga_j = ga[j];
        let col = gram.column(j);
        for (g, c) in ga.iter_mut().zip(col) {
            *g = s * *g + t * c;
        }
        qa = s * qa + t * qs[j];
        aa = s * s * aa + 2.0 * t * s * ga_j + t * t * gram.diag(j);
        for w in weights.iter_mut() {
            *w *= s;
        }
        weights[j] += t;
        prune(&mut weights);

        // exact decrease along the segment: |q - a|^2 - t (2 gap - t h)
        dist_sq = (dist_sq - t * (2.0 * gap - t * h)).max(0.0);
        steps += 1;
        if record_trace {
            trace.push(dist_sq.sqrt());
        }
    };

    Descent { weights, dist_sq, steps, stop, trace }
}

fn prune(weights: &mut [f64]) {
    let mut pruned = false;
    for w in weights.iter_mut() {
        if *w != 0.0 && *w < PRUNE_BELOW {
            *w = 0.0;
            pruned = true;
        }
    }
    if pruned {
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            for w in weights.iter_mut() {
                *w /= sum;
            }
        }
    }
}
