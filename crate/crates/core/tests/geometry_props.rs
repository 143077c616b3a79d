mod common;

use common::{all, points};
use hullcore::geometry::{
    diameter_2approx, dot, exact_diameter, extreme_point, norm, normalize_to_unit_ball, Direction, DotAccess, GramMatrix,
    PointSet,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalized_points_fit_the_unit_ball(ps in points(1..=40, 1..=6), shift in -50.0..50.0f64, stretch in 0.01..100.0f64) {
        let raw: Vec<Vec<f64>> = ps.rows().map(|p| p.iter().map(|x| x * stretch + shift).collect()).collect();
        let (out, t) = normalize_to_unit_ball(&raw).unwrap();
        prop_assert!(t.scale > 0.0);
        for (i, p) in out.rows().enumerate() {
            prop_assert!(norm(p) <= 1.0 + 1e-12);
            let back = t.invert(p);
            for (a, b) in back.iter().zip(&raw[i]) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
            prop_assert!((out.norm_sq(i) - dot(p, p)).abs() <= 1e-12 * dot(p, p).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn diameter_estimate_within_factor_two(ps in points(2..=60, 1..=5)) {
        let acc = DotAccess::from(&ps);
        let exact = exact_diameter(&acc, &all(&ps));
        let est = diameter_2approx(&acc);
        prop_assert!(est >= exact - 1e-12 && est <= 2.0 * exact + 1e-12);
    }

    #[test]
    fn extreme_point_matches_exhaustive_scan(ps in points(1..=30, 2..=5), seed in any::<u64>()) {
        let d = ps.dim();
        let dir: Vec<f64> = (0..d).map(|k| ((seed >> (k * 7)) % 97) as f64 - 48.0).collect();
        prop_assume!(dot(&dir, &dir) > 0.0);
        let acc = DotAccess::from(&ps);
        let got = extreme_point(&acc, Direction::Vector(&dir)).unwrap();
        let mut best = 0;
        for i in 0..ps.len() {
            if dot(ps.point(i), &dir) > dot(ps.point(best), &dir) {
                best = i;
            }
        }
        prop_assert_eq!(got, best);

        // appending duplicates with higher indices does not move the answer
        let mut rows = ps.to_rows();
        rows.extend(ps.to_rows());
        let doubled = PointSet::from_rows(&rows).unwrap();
        prop_assert_eq!(extreme_point(&DotAccess::from(&doubled), Direction::Vector(&dir)).unwrap(), got);
    }

    #[test]
    fn gram_and_explicit_access_agree(ps in points(1..=20, 1..=6)) {
        let g = GramMatrix::from_points(&ps);
        let (ea, ga) = (DotAccess::from(&ps), DotAccess::from(&g));
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                prop_assert_eq!(ea.dot(i, j), ga.dot(i, j));
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
            prop_assert!(g.get(i, i) >= 0.0);
        }
    }
}
