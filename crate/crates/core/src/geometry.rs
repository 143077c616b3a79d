//! Point storage, unit-ball normalization and the dot-product seam.
//!
//! Every algorithm in the crate reads points through [`DotAccess`], which
//! answers inner products either from explicit coordinates or from a
//! precomputed gram matrix. Both modes go through the same [`dot`] routine
//! when the gram matrix is built from coordinates, so a linear-kernel run
//! reproduces an explicit run bit for bit.

use serde::{Deserialize, Serialize};

use crate::combination::SparseCombination;
use crate::error::{Error, Result};

/// Inner product used everywhere in the crate.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `n` points in `d` dimensions, stored row-major, with cached squared norms.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    d: usize,
    coords: Vec<f64>,
    norms_sq: Vec<f64>,
}

impl PointSet {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput)?;
        let d = first.as_ref().len();
        if d == 0 {
            return Err(Error::InvalidParameter("points must have at least one coordinate".into()));
        }
        let mut coords = Vec::with_capacity(rows.len() * d);
        for (row, values) in rows.iter().enumerate() {
            let values = values.as_ref();
            if values.len() != d {
                return Err(Error::RaggedRow { row, expected: d, found: values.len() });
            }
            coords.extend_from_slice(values);
        }
        Self::from_flat(rows.len(), d, coords)
    }

    /// Builds a point set from row-major data of length `n * d`.
    pub fn from_flat(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if d == 0 {
            return Err(Error::InvalidParameter("points must have at least one coordinate".into()));
        }
        if coords.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, found: coords.len() });
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / d, col: pos % d });
        }
        let norms_sq = coords.chunks_exact(d).map(|p| dot(p, p)).collect();
        Ok(Self { n, d, coords, norms_sq })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn norm_sq(&self, i: usize) -> f64 {
        self.norms_sq[i]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    /// Row-major coordinate buffer.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Points with the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        let mut coords = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            self.check_index(i)?;
            coords.extend_from_slice(self.point(i));
        }
        PointSet::from_flat(indices.len(), self.d, coords)
    }

    /// Concatenates two point sets of the same dimension.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: other.d });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        PointSet::from_flat(self.n + other.n, self.d, coords)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.n })
        }
    }
}

/// Symmetric `n x n` matrix of pairwise inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// Validates symmetry, finiteness and non-negative diagonal.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, values) in rows.iter().enumerate() {
            let values = values.as_ref();
            if values.len() != n {
                return Err(Error::RaggedRow { row, expected: n, found: values.len() });
            }
            if let Some(col) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
            entries.extend_from_slice(values);
        }
        for i in 0..n {
            if entries[i * n + i] < 0.0 {
                return Err(Error::InvalidGram(format!("negative diagonal entry at {i}")));
            }
            for j in 0..i {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidGram(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Linear-kernel gram matrix of a point set.
    pub fn from_points(ps: &PointSet) -> Self {
        let n = ps.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = ps.norm_sq(i);
            for j in 0..i {
                let v = dot(ps.point(i), ps.point(j));
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self { n, entries }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Source of inner products between dataset points.
#[derive(Debug, Clone, Copy)]
pub enum DotAccess<'a> {
    Explicit(&'a PointSet),
    Gram(&'a GramMatrix),
}

impl<'a> From<&'a PointSet> for DotAccess<'a> {
    fn from(ps: &'a PointSet) -> Self {
        DotAccess::Explicit(ps)
    }
}

impl<'a> From<&'a GramMatrix> for DotAccess<'a> {
    fn from(g: &'a GramMatrix) -> Self {
        DotAccess::Gram(g)
    }
}

impl<'a> DotAccess<'a> {
    #[inline]
    pub fn len(&self) -> usize {
        match self {
            DotAccess::Explicit(ps) => ps.len(),
            DotAccess::Gram(g) => g.len(),
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dot(&self, i: usize, j: usize) -> f64 {
        match self {
            DotAccess::Explicit(ps) => {
                if i == j {
                    ps.norm_sq(i)
                } else {
                    dot(ps.point(i), ps.point(j))
                }
            }
            DotAccess::Gram(g) => g.get(i, j),
        }
    }

    #[inline]
    pub fn norm_sq(&self, i: usize) -> f64 {
        match self {
            DotAccess::Explicit(ps) => ps.norm_sq(i),
            DotAccess::Gram(g) => g.get(i, i),
        }
    }

    /// Squared distance between two dataset points, through dot products only.
    #[inline]
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        (self.norm_sq(i) + self.norm_sq(j) - 2.0 * self.dot(i, j)).max(0.0)
    }

    pub fn coords(&self) -> Option<&'a PointSet> {
        match self {
            DotAccess::Explicit(ps) => Some(ps),
            DotAccess::Gram(_) => None,
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    /// Writes `<p_i, p_j>` for every `i` into `out`.
    pub(crate) fn column_into(&self, j: usize, out: &mut Vec<f64>) {
        out.clear();
        match self {
            DotAccess::Explicit(_) => out.extend((0..self.len()).map(|i| self.dot(i, j))),
            DotAccess::Gram(g) => out.extend_from_slice(g.row(j)),
        }
    }
}

/// A point that algorithms may be asked about.
///
/// Gram mode can only answer queries that are combinations of dataset points.
#[derive(Debug, Clone, Copy)]
pub enum Query<'q> {
    Vector(&'q [f64]),
    Point(usize),
    Combination(&'q SparseCombination),
}

impl Query<'_> {
    pub(crate) fn validate(&self, acc: &DotAccess) -> Result<()> {
        match self {
            Query::Vector(v) => {
                let ps = acc.coords().ok_or(Error::NeedsCoordinates)?;
                if v.len() != ps.dim() {
                    return Err(Error::DimensionMismatch { expected: ps.dim(), found: v.len() });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("query has non-finite coordinates".into()));
                }
                Ok(())
            }
            Query::Point(i) => acc.check_index(*i),
            Query::Combination(c) => c.check_indices(acc.len()),
        }
    }

    /// `<q, p_i>`.
    pub(crate) fn dot_point(&self, acc: &DotAccess, i: usize) -> f64 {
        match self {
            Query::Vector(v) => dot(v, acc.coords().expect("validated").point(i)),
            Query::Point(j) => acc.dot(*j, i),
            Query::Combination(c) => c.dot_point(acc, i),
        }
    }

    pub(crate) fn norm_sq(&self, acc: &DotAccess) -> f64 {
        match self {
            Query::Vector(v) => dot(v, v),
            Query::Point(j) => acc.norm_sq(*j),
            Query::Combination(c) => c.norm_sq(acc),
        }
    }

    /// Coordinates of the query, when the access is explicit.
    pub(crate) fn to_vector(&self, ps: &PointSet) -> Vec<f64> {
        match self {
            Query::Vector(v) => v.to_vec(),
            Query::Point(j) => ps.point(*j).to_vec(),
            Query::Combination(c) => c.evaluate(ps),
        }
    }
}

/// Affine map placing a point set inside the unit ball: `x -> (x - center) * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallTransform {
    pub center: Vec<f64>,
    pub scale: f64,
}

impl BallTransform {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(v, c)| (v - c) * self.scale).collect()
    }

    pub fn invert(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.center).map(|(v, c)| v / self.scale + c).collect()
    }

    /// Applies the transform to raw rows, validating them like [`normalize_to_unit_ball`].
    pub fn apply_rows<R: AsRef<[f64]>>(&self, rows: &[R]) -> Result<PointSet> {
        let raw = PointSet::from_rows(rows)?;
        if raw.dim() != self.center.len() {
            return Err(Error::DimensionMismatch { expected: self.center.len(), found: raw.dim() });
        }
        let mapped: Vec<Vec<f64>> = raw.rows().map(|r| self.apply(r)).collect();
        PointSet::from_rows(&mapped)
    }

    /// Rescales a length measured in normalized units back to raw units.
    pub fn raw_length(&self, len: f64) -> f64 {
        len / self.scale
    }
}

/// Translates the bounding-box midpoint to the origin and scales so the
/// farthest point lands on the unit sphere.
pub fn normalize_to_unit_ball<R: AsRef<[f64]>>(rows: &[R]) -> Result<(PointSet, BallTransform)> {
    let raw = PointSet::from_rows(rows)?;
    let d = raw.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in raw.rows() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let max_norm = raw
        .rows()
        .map(|p| dist_sq(p, &center).sqrt())
        .fold(0.0_f64, f64::max);
    let scale = if max_norm > 0.0 { 1.0 / max_norm } else { 1.0 };
    let transform = BallTransform { center, scale };
    let mapped: Vec<f64> = raw.rows().flat_map(|p| transform.apply(p)).collect();
    let ps = PointSet::from_flat(raw.len(), d, mapped)?;
    Ok((ps, transform))
}

/// `2 * max_j |p_0 - p_j|`, which lies in `[diam, 2 * diam]`.
pub fn diameter_2approx(acc: &DotAccess) -> f64 {
    2.0 * (0..acc.len())
        .map(|j| acc.dist_sq(0, j).sqrt())
        .fold(0.0_f64, f64::max)
}

/// Exact diameter of the given points by all-pairs scan.
pub fn exact_diameter(acc: &DotAccess, indices: &[usize]) -> f64 {
    let mut best = 0.0_f64;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            best = best.max(acc.dist_sq(i, j));
        }
    }
    best.sqrt()
}

/// Direction for extremal queries.
#[derive(Debug, Clone, Copy)]
pub enum Direction<'a> {
    Vector(&'a [f64]),
    /// The vector `q - a`, answerable through dot products alone.
    Difference { toward: Query<'a>, from: &'a SparseCombination },
}

/// Index maximizing `<p_i, v>`; ties go to the lowest index.
pub fn extreme_point(acc: &DotAccess, dir: Direction) -> Result<usize> {
    let all: Vec<usize> = (0..acc.len()).collect();
    extreme_point_among(acc, &all, dir)
}

/// Like [`extreme_point`] but restricted to `candidates`. Returns a point index.
pub fn extreme_point_among(acc: &DotAccess, candidates: &[usize], dir: Direction) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptySelection);
    }
    for &c in candidates {
        acc.check_index(c)?;
    }
    let score: Box<dyn Fn(usize) -> f64 + '_> = match dir {
        Direction::Vector(v) => {
            let ps = acc.coords().ok_or(Error::NeedsCoordinates)?;
            if v.len() != ps.dim() {
                return Err(Error::DimensionMismatch { expected: ps.dim(), found: v.len() });
            }
            if !(dot(v, v) > 0.0) {
                return Err(Error::ZeroDirection);
            }
            Box::new(move |i| dot(ps.point(i), v))
        }
        Direction::Difference { toward, from } => {
            toward.validate(acc)?;
            from.check_indices(acc.len())?;
            let qq = toward.norm_sq(acc);
            let qa: f64 = from.entries().iter().map(|&(j, w)| w * toward.dot_point(acc, j)).sum();
            let aa = from.norm_sq(acc);
            if !(qq - 2.0 * qa + aa > 0.0) {
                return Err(Error::ZeroDirection);
            }
            Box::new(move |i| toward.dot_point(acc, i) - from.dot_point(acc, i))
        }
    };
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &i in &candidates[1..] {
        let s = score(i);
        if s > best_score || (s == best_score && i < best) {
            best = i;
            best_score = s;
        }
    }
    Ok(best)
}
