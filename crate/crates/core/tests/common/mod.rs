#![allow(dead_code)]

use hullcore::geometry::PointSet;
use proptest::prelude::*;

/// `n` points in `d` dimensions with coordinates in `[-1, 1)`.
pub fn points(n: std::ops::RangeInclusive<usize>, d: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointSet> {
    (n, d).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, d), n)
            .prop_map(|rows| PointSet::from_rows(&rows).unwrap())
    })
}

/// Points plus a query of matching dimension with coordinates in `[-1.5, 1.5)`.
pub fn points_and_query(
    n: std::ops::RangeInclusive<usize>,
    d: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (PointSet, Vec<f64>)> {
    points(n, d).prop_flat_map(|ps| {
        let d = ps.dim();
        (Just(ps), prop::collection::vec(-1.5..1.5f64, d))
    })
}

pub fn all(ps: &PointSet) -> Vec<usize> {
    (0..ps.len()).collect()
}
