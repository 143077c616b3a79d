//! Exact nearest point of a convex hull by face enumeration.
//!
//! For every affinely independent subset of at most `d + 1` candidates the
//! query is projected onto the subset's affine hull; projections with
//! non-negative barycentric coordinates are feasible and the nearest one is
//! the answer. Candidates are visited nearest-first and the scan ends early
//! once a feasible point satisfies the first-order optimality condition
//! `<x - a, q - a> <= 0` for every candidate `x`.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::{dist_sq, dot, PointSet};

/// Maximum number of candidate faces the oracle agrees to enumerate.
pub const ORACLE_FACE_LIMIT: u128 = 50_000_000;

const BARY_TOL: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleProjection {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Point indices of the supporting face with their barycentric weights.
    pub face: Vec<(usize, f64)>,
}

/// Number of faces with at most `d + 1` vertices among `m` candidates.
pub fn oracle_face_count(m: usize, d: usize) -> u128 {
    let max_k = (d + 1).min(m);
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 1..=max_k {
        binom = binom * (m - k + 1) as u128 / k as u128;
        total = total.saturating_add(binom);
        if total > ORACLE_FACE_LIMIT * 1000 {
            return total;
        }
    }
    total
}

pub fn oracle_fits(m: usize, d: usize) -> bool {
    oracle_face_count(m, d) <= ORACLE_FACE_LIMIT
}

/// Exact projection of `q` onto the hull of all points.
pub fn exact_project_oracle(q: &[f64], ps: &PointSet) -> Result<OracleProjection> {
    let all: Vec<usize> = (0..ps.len()).collect();
    exact_project_oracle_among(q, ps, &all)
}

/// Exact projection of `q` onto the hull of `candidates`.
pub fn exact_project_oracle_among(q: &[f64], ps: &PointSet, candidates: &[usize]) -> Result<OracleProjection> {
    if candidates.is_empty() {
        return Err(Error::EmptySelection);
    }
    if q.len() != ps.dim() {
        return Err(Error::DimensionMismatch { expected: ps.dim(), found: q.len() });
    }
    for &c in candidates {
        ps.check_index(c)?;
    }
    let (m, d) = (candidates.len(), ps.dim());
    let faces = oracle_face_count(m, d);
    if faces > ORACLE_FACE_LIMIT {
        return Err(Error::OracleLimit { subsets: faces, limit: ORACLE_FACE_LIMIT });
    }

    let mut order: Vec<(f64, usize)> = candidates.iter().map(|&c| (dist_sq(q, ps.point(c)), c)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = order.into_iter().map(|e| e.1).collect();

    let scale = order
        .iter()
        .map(|&c| ps.norm_sq(c))
        .fold(dot(q, q), f64::max)
        .max(1.0);
    let kkt_tol = 1e-12 * scale;
    let max_k = (d + 1).min(m);

    let mut best: Option<OracleProjection> = None;
    let mut best_d2 = f64::INFINITY;
    for newest in 0..m {
        for k in 1..=max_k.min(newest + 1) {
            for mut face in (0..newest).combinations(k - 1) {
                face.push(newest);
                let verts: Vec<&[f64]> = face.iter().map(|&f| ps.point(order[f])).collect();
                let Some((point, bary)) = project_affine(q, &verts) else {
                    continue;
                };
                if bary.iter().any(|&b| b < BARY_TOL) {
                    continue;
                }
                let d2 = dist_sq(q, &point);
                if d2 < best_d2 {
                    best_d2 = d2;
                    let optimal = is_optimal(q, &point, ps, &order, kkt_tol);
                    best = Some(OracleProjection {
                        distance: d2.sqrt(),
                        face: face.iter().map(|&f| order[f]).zip(bary).collect(),
                        point,
                    });
                    if optimal {
                        return Ok(best.unwrap());
                    }
                }
            }
        }
    }
    // every single vertex is a feasible face, so a candidate always exists
    Ok(best.expect("at least one vertex face"))
}

fn is_optimal(q: &[f64], a: &[f64], ps: &PointSet, order: &[usize], tol: f64) -> bool {
    let v: Vec<f64> = q.iter().zip(a).map(|(x, y)| x - y).collect();
    let av = dot(a, &v);
    order.iter().all(|&c| dot(ps.point(c), &v) - av <= tol)
}

/// Orthogonal projection of `q` onto the affine hull of `verts`, with
/// barycentric coordinates; `None` when the vertices are affinely dependent.
fn project_affine(q: &[f64], verts: &[&[f64]]) -> Option<(Vec<f64>, Vec<f64>)> {
    let base = verts[0];
    let k = verts.len() - 1;
    if k == 0 {
        return Some((base.to_vec(), vec![1.0]));
    }
    let edges: Vec<Vec<f64>> = verts[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let rel: Vec<f64> = q.iter().zip(base).map(|(a, b)| a - b).collect();
    let mut mat = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            mat[i][j] = dot(&edges[i], &edges[j]);
        }
        mat[i][k] = dot(&edges[i], &rel);
    }
    let max_diag = (0..k).map(|i| mat[i][i]).fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return None;
    }
    let lambda = solve_in_place(&mut mat, 1e-12 * max_diag)?;
    let mut point = base.to_vec();
    for (l, e) in lambda.iter().zip(&edges) {
        for (p, x) in point.iter_mut().zip(e) {
            *p += l * x;
        }
    }
    let mut bary = Vec::with_capacity(k + 1);
    bary.push(1.0 - lambda.iter().sum::<f64>());
    bary.extend(lambda);
    Some((point, bary))
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)` system.
fn solve_in_place(mat: &mut [Vec<f64>], pivot_tol: f64) -> Option<Vec<f64>> {
    let k = mat.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))?;
        if mat[piv][col].abs() <= pivot_tol {
            return None;
        }
        mat.swap(col, piv);
        for row in col + 1..k {
            let f = mat[row][col] / mat[col][col];
            if f != 0.0 {
                for c in col..=k {
                    mat[row][c] -= f * mat[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = mat[row][k];
        for c in row + 1..k {
            s -= mat[row][c] * x[c];
        }
        x[row] = s / mat[row][row];
    }
    Some(x)
}
