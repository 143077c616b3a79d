//! Orthonormal basis of the span of the selected points, with every point's
//! coordinates in that basis and its distance to the span.
//!
//! Basis vectors are kept as coefficients over the points that generated
//! them, and all arithmetic goes through dot products with cached generator
//! columns. Coordinate and gram inputs therefore produce identical states.

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{dot, DotAccess};

/// Incremental Gram-Schmidt state shared by all points.
#[derive(Debug, Clone)]
pub struct SubspaceState {
    generators: Vec<usize>,
    /// `columns[t][i] = <p_i, p_{generators[t]}>`.
    columns: Vec<Vec<f64>>,
    /// `v_j = sum_t coeffs[j][t] * p_{generators[t]}`; row `j` has `j + 1` entries.
    coeffs: Vec<Vec<f64>>,
    coords: Vec<Vec<f64>>,
    resid_sq: Vec<f64>,
    tol_span: f64,
}

impl SubspaceState {
    /// Empty basis. A point extends the basis only if it lies farther than
    /// `tol_span` from the current span.
    pub fn new(acc: &DotAccess, tol_span: f64) -> Self {
        let n = acc.len();
        Self {
            generators: Vec::new(),
            columns: Vec::new(),
            coeffs: Vec::new(),
            coords: vec![Vec::new(); n],
            resid_sq: (0..n).map(|i| acc.norm_sq(i)).collect(),
            tol_span,
        }
    }

    pub fn basis_count(&self) -> usize {
        self.coeffs.len()
    }

    /// `<p_i, v_j>` for every basis vector.
    pub fn coords(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// Distance of point `i` to the span.
    pub fn resid(&self, i: usize) -> f64 {
        self.resid_sq[i].sqrt()
    }

    pub fn resid_sq(&self, i: usize) -> f64 {
        self.resid_sq[i]
    }

    pub fn tol_span(&self) -> f64 {
        self.tol_span
    }

    /// `<p_{generators[a]}, p_{generators[b]}>`.
    fn gen_dot(&self, a: usize, b: usize) -> f64 {
        self.columns[b][self.generators[a]]
    }

    /// `G w`, where `G` is the gram of the generators followed by a candidate
    /// whose inner products with them (and itself, last) are `extra`.
    fn gram_times(&self, w: &[f64], extra: &[f64]) -> Vec<f64> {
        let m = self.generators.len();
        let entry = |a: usize, b: usize| match (a < m, b < m) {
            (true, true) => self.gen_dot(a, b),
            (false, _) => extra[b],
            (true, false) => extra[a],
        };
        (0..w.len()).map(|a| w.iter().enumerate().map(|(b, wb)| entry(a, b) * wb).sum()).collect()
    }

    /// Adds point `index` to the spanning set. Returns `false` when the point
    /// already lies within `tol_span` of the span (basis unchanged).
    pub fn extend(&mut self, acc: &DotAccess, index: usize) -> Result<bool> {
        acc.check_index(index)?;
        let n = acc.len();
        let k = self.generators.len() + 1;
        let column: Vec<f64> = (0..n).into_par_iter().map(|i| acc.dot(i, index)).collect();
        // inner products of the candidate with the existing generators, then itself
        let mut extra: Vec<f64> = self.generators.iter().map(|&g| column[g]).collect();
        extra.push(acc.norm_sq(index));

        let mut r = vec![0.0; k];
        r[k - 1] = 1.0;
        // classical Gram-Schmidt, applied twice
        for _ in 0..2 {
            let gr = self.gram_times(&r, &extra);
            let proj: Vec<f64> = self.coeffs.iter().map(|c| dot(c, &gr[..c.len()])).collect();
            for (c, p) in self.coeffs.iter().zip(&proj) {
                for (x, y) in r.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let gr = self.gram_times(&r, &extra);
        let resid = dot(&r, &gr).max(0.0).sqrt();
        if resid <= self.tol_span {
            return Ok(false);
        }
        for x in r.iter_mut() {
            *x /= resid;
        }
        let columns = &self.columns;
        let new_coords: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut s = r[k - 1] * column[i];
                for (t, col) in columns.iter().enumerate() {
                    s += r[t] * col[i];
                }
                s
            })
            .collect();
        self.generators.push(index);
        self.columns.push(column);
        self.coeffs.push(r);
        for (i, c) in new_coords.into_iter().enumerate() {
            self.coords[i].push(c);
            self.resid_sq[i] = (self.resid_sq[i] - c * c).max(0.0);
        }
        Ok(true)
    }

    /// Basis vector `j` in coordinates, when the access has them.
    pub fn basis_vector(&self, acc: &DotAccess, j: usize) -> Option<Vec<f64>> {
        let ps = acc.coords()?;
        let c = self.coeffs.get(j)?;
        let mut v = vec![0.0; ps.dim()];
        for (w, &g) in c.iter().zip(&self.generators) {
            for (x, y) in v.iter_mut().zip(ps.point(g)) {
                *x += w * y;
            }
        }
        Some(v)
    }

    /// Largest deviation of the basis gram from the identity. Evaluated on
    /// coordinates when available, otherwise through the point gram.
    pub fn orthonormality_error(&self, acc: &DotAccess) -> f64 {
        let k = self.basis_count();
        let explicit: Option<Vec<Vec<f64>>> = (0..k).map(|j| self.basis_vector(acc, j)).collect();
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in 0..=a {
                let ip = match &explicit {
                    Some(v) => dot(&v[a], &v[b]),
                    None => {
                        let (ca, cb) = (&self.coeffs[a], &self.coeffs[b]);
                        let mut s = 0.0;
                        for (s1, w1) in ca.iter().enumerate() {
                            for (s2, w2) in cb.iter().enumerate() {
                                s += w1 * w2 * self.gen_dot(s1, s2);
                            }
                        }
                        s
                    }
                };
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// Largest relative violation of `|p|^2 = |coords|^2 + resid^2`.
    pub fn pythagorean_error(&self, acc: &DotAccess) -> f64 {
        (0..self.coords.len())
            .map(|i| {
                let total = acc.norm_sq(i);
                let split = dot(&self.coords[i], &self.coords[i]) + self.resid_sq[i];
                (total - split).abs() / total.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GramMatrix, PointSet};

    #[test]
    fn first_point_spans_its_line() {
        let ps = PointSet::from_rows(&[[3.0, 4.0], [1.0, 0.0]]).unwrap();
        let acc = DotAccess::from(&ps);
        let mut st = SubspaceState::new(&acc, 1e-9);
        assert!(st.extend(&acc, 0).unwrap());
        assert_eq!(st.basis_count(), 1);
        let v = st.basis_vector(&acc, 0).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        assert!(st.resid(0) < 1e-7);
    }

    #[test]
    fn second_vector_completes_the_plane() {
        let ps = PointSet::from_rows(&[[1.0, 0.0], [1.0, 1.0], [3.0, 4.0]]).unwrap();
        let acc = DotAccess::from(&ps);
        let mut st = SubspaceState::new(&acc, 1e-9);
        st.extend(&acc, 0).unwrap();
        st.extend(&acc, 1).unwrap();
        let e2 = st.basis_vector(&acc, 1).unwrap();
        assert!(e2[0].abs() < 1e-15 && (e2[1] - 1.0).abs() < 1e-15);
        assert!((st.coords(2)[0] - 3.0).abs() < 1e-12 && (st.coords(2)[1] - 4.0).abs() < 1e-12);
        assert!(st.resid(2) < 1e-7);
    }

    #[test]
    fn point_in_span_leaves_basis_unchanged() {
        // third point is 0.3 * p0 - 1.7 * p1
        let p0 = [0.2, -0.4, 0.1, 0.9];
        let p1 = [0.5, 0.5, -0.3, 0.0];
        let p2: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| 0.3 * a - 1.7 * b).collect();
        let ps = PointSet::from_rows(&[p0.to_vec(), p1.to_vec(), p2]).unwrap();
        let acc = DotAccess::from(&ps);
        let mut st = SubspaceState::new(&acc, 1e-6);
        st.extend(&acc, 0).unwrap();
        st.extend(&acc, 1).unwrap();
        let before: Vec<Vec<f64>> = (0..3).map(|i| st.coords(i).to_vec()).collect();
        assert!(!st.extend(&acc, 2).unwrap());
        assert_eq!(st.basis_count(), 2);
        for i in 0..3 {
            assert_eq!(st.coords(i), before[i].as_slice());
        }
    }

    #[test]
    fn gram_and_explicit_states_are_identical() {
        let rows = [[0.1, 0.7, -0.2], [0.5, -0.1, 0.3], [-0.4, 0.2, 0.6], [0.3, 0.3, 0.3]];
        let ps = PointSet::from_rows(&rows).unwrap();
        let g = GramMatrix::from_points(&ps);
        let (ea, ga) = (DotAccess::from(&ps), DotAccess::from(&g));
        let mut es = SubspaceState::new(&ea, 1e-9);
        let mut gs = SubspaceState::new(&ga, 1e-9);
        for i in [2, 0, 1] {
            assert_eq!(es.extend(&ea, i).unwrap(), gs.extend(&ga, i).unwrap());
        }
        for i in 0..4 {
            assert_eq!(es.coords(i), gs.coords(i));
            assert_eq!(es.resid_sq(i), gs.resid_sq(i));
        }
        assert!(gs.orthonormality_error(&ga) < 1e-10);
        assert!(es.orthonormality_error(&ea) < 1e-12);
        assert!(gs.pythagorean_error(&ga) < 1e-10);
    }

    #[test]
    fn invalid_index() {
        let ps = PointSet::from_rows(&[[1.0]]).unwrap();
        let acc = DotAccess::from(&ps);
        let mut st = SubspaceState::new(&acc, 1e-9);
        assert!(st.extend(&acc, 3).is_err());
    }
}
