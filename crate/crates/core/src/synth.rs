//! Seeded synthetic instances: points near k segments, spherical packings and
//! uniform samples of the unit ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, PointSet};

/// Consecutive rejected samples after which the packing is considered full.
pub const PACKING_PATIENCE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

/// Ground truth of a k-lines instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KLinesMeta {
    pub k: usize,
    pub strip: f64,
    pub seed: u64,
    pub segments: Vec<Segment>,
    /// For each line, the dataset points with the smallest and largest
    /// segment parameter. Their hull is within `2 * strip` of every point.
    pub certificate: Vec<usize>,
    /// Line of each point.
    pub labels: Vec<usize>,
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian(rng, d);
        let len = dot(&v, &v).sqrt();
        if len > 1e-12 {
            v.iter_mut().for_each(|x| *x /= len);
            return v;
        }
    }
}

fn ball_point(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    unit_vector(rng, d).into_iter().map(|x| x * r).collect()
}

/// `n` points spread over `k` random segments inside the unit ball, each
/// moved orthogonally to its segment by at most `strip`.
pub fn gen_klines(k: usize, n: usize, d: usize, strip: f64, seed: u64) -> Result<(PointSet, KLinesMeta)> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidParameter("k and d must be at least 1".into()));
    }
    if n < 2 * k {
        return Err(Error::InvalidParameter(format!("need n >= 2k points, got n = {n}, k = {k}")));
    }
    if !(0.0..1.0).contains(&strip) {
        return Err(Error::InvalidParameter(format!("strip must lie in [0, 1), got {strip}")));
    }
    let mut rng = rng_for(seed);
    let segments: Vec<Segment> = (0..k)
        .map(|_| Segment { start: ball_point(&mut rng, d, 1.0 - strip), end: ball_point(&mut rng, d, 1.0 - strip) })
        .collect();

    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut extremes: Vec<Option<((f64, usize), (f64, usize))>> = vec![None; k];
    for i in 0..n {
        let line = i % k;
        let seg = &segments[line];
        let t: f64 = rng.random();
        let dir: Vec<f64> = seg.end.iter().zip(&seg.start).map(|(b, a)| b - a).collect();
        let mut p: Vec<f64> = seg.start.iter().zip(&dir).map(|(a, u)| a + t * u).collect();
        if strip > 0.0 && d > 1 {
            let mut jitter = gaussian(&mut rng, d);
            let len_sq = dot(&dir, &dir);
            if len_sq > 0.0 {
                let c = dot(&jitter, &dir) / len_sq;
                jitter.iter_mut().zip(&dir).for_each(|(j, u)| *j -= c * u);
            }
            let len = dot(&jitter, &jitter).sqrt();
            let size = strip * rng.random::<f64>();
            if len > 0.0 {
                p.iter_mut().zip(&jitter).for_each(|(x, j)| *x += size * j / len);
            }
        }
        let e = extremes[line].get_or_insert(((t, i), (t, i)));
        if t < e.0 .0 {
            e.0 = (t, i);
        }
        if t > e.1 .0 {
            e.1 = (t, i);
        }
        rows.push(p);
        labels.push(line);
    }
    let mut certificate: Vec<usize> = extremes
        .into_iter()
        .flat_map(|e| {
            let (lo, hi) = e.expect("every line receives a point");
            [lo.1, hi.1]
        })
        .collect();
    certificate.dedup();
    let meta = KLinesMeta { k, strip, seed, segments, certificate, labels };
    Ok((PointSet::from_rows(&rows)?, meta))
}

/// Greedy packing of the unit sphere in `d` dimensions: uniform samples are
/// kept when at least `spacing` from every kept point, until
/// [`PACKING_PATIENCE`] samples in a row are rejected.
pub fn gen_sphere_packing(d: usize, spacing: f64, seed: u64) -> Result<PointSet> {
    if !(2..=4).contains(&d) {
        return Err(Error::InvalidParameter(format!("packing dimension must be 2, 3 or 4, got {d}")));
    }
    if !(spacing > 0.0 && spacing < 1.0) {
        return Err(Error::InvalidParameter(format!("spacing must lie in (0, 1), got {spacing}")));
    }
    let mut rng = rng_for(seed);
    let min_sq = spacing * spacing;
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut misses = 0;
    while misses < PACKING_PATIENCE {
        let u = unit_vector(&mut rng, d);
        if kept.iter().all(|p| crate::geometry::dist_sq(p, &u) >= min_sq) {
            kept.push(u);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    PointSet::from_rows(&kept)
}

/// `n` uniform points in the unit ball.
pub fn gen_uniform_ball(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("n and d must be at least 1".into()));
    }
    let mut rng = rng_for(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| ball_point(&mut rng, d, 1.0)).collect();
    PointSet::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist_sq, norm};

    #[test]
    fn klines_shape_and_determinism() {
        let (ps, meta) = gen_klines(3, 30, 4, 1e-3, 11).unwrap();
        assert_eq!((ps.len(), ps.dim()), (30, 4));
        assert_eq!(meta.segments.len(), 3);
        assert_eq!(meta.certificate.len(), 6);
        assert!(ps.rows().all(|p| norm(p) <= 1.0 + 1e-12));
        let (again, meta2) = gen_klines(3, 30, 4, 1e-3, 11).unwrap();
        assert_eq!(ps, again);
        assert_eq!(meta, meta2);
    }

    #[test]
    fn klines_rejects_bad_parameters() {
        assert!(gen_klines(0, 10, 2, 0.0, 1).is_err());
        assert!(gen_klines(3, 5, 2, 0.0, 1).is_err());
        assert!(gen_klines(1, 5, 2, -0.1, 1).is_err());
    }

    #[test]
    fn packing_respects_spacing() {
        let ps = gen_sphere_packing(2, 0.5, 3).unwrap();
        assert!((8..=13).contains(&ps.len()), "{}", ps.len());
        for i in 0..ps.len() {
            assert!((norm(ps.point(i)) - 1.0).abs() < 1e-12);
            for j in 0..i {
                assert!(dist_sq(ps.point(i), ps.point(j)) >= 0.25);
            }
        }
        assert!(gen_sphere_packing(5, 0.5, 3).is_err());
        assert!(gen_sphere_packing(3, 1.0, 3).is_err());
    }

    #[test]
    fn uniform_ball_mean_norm() {
        let ps = gen_uniform_ball(10_000, 2, 5).unwrap();
        let mean = ps.rows().map(norm).sum::<f64>() / 10_000.0;
        assert!((mean - 2.0 / 3.0).abs() < 0.02, "{mean}");
        assert!(ps.rows().all(|p| norm(p) <= 1.0));
        assert_eq!(ps, gen_uniform_ball(10_000, 2, 5).unwrap());
    }
}
