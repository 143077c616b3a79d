mod common;

use common::points;
use hullcore::caratheodory::exact_project_oracle_among;
use hullcore::eval::{evaluate, hausdorff_one_sided, EvalMethod, HausdorffMode};
use hullcore::geometry::{dist_sq, exact_diameter, norm, DotAccess};
use hullcore::greedy_hull::{greedy_cluster, Engine};
use hullcore::io::{read_points_bin, read_points_csv, write_points_bin, write_points_csv};
use hullcore::synth::{gen_klines, gen_sphere_packing, gen_uniform_ball};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn approximate_hausdorff_brackets_the_oracle(ps in points(3..=25, 1..=3), eps_fine in 0.01..0.2f64, mask in any::<u32>()) {
        let acc = DotAccess::from(&ps);
        let mut t: Vec<usize> = (0..ps.len()).filter(|i| mask >> (i % 32) & 1 == 1).collect();
        if t.is_empty() {
            t.push(0);
        }
        let oracle = hausdorff_one_sided(&acc, &t, HausdorffMode::Oracle).unwrap();
        let approx = hausdorff_one_sided(&acc, &t, HausdorffMode::Approximate { eps_fine }).unwrap();
        let diam = exact_diameter(&acc, &t);
        prop_assert!(approx >= oracle - 1e-9);
        prop_assert!(approx <= oracle + eps_fine * diam + 1e-9);
    }

    #[test]
    fn point_sets_survive_csv_and_binary(ps in points(1..=20, 1..=5)) {
        let mut csv = Vec::new();
        write_points_csv(&mut csv, &ps).unwrap();
        prop_assert_eq!(read_points_csv(csv.as_slice(), false).unwrap(), ps.clone());
        let mut bin = Vec::new();
        write_points_bin(&mut bin, &ps).unwrap();
        prop_assert_eq!(read_points_bin(bin.as_slice()).unwrap(), ps);
    }

    #[test]
    fn generators_are_seed_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(gen_uniform_ball(20, 3, seed).unwrap(), gen_uniform_ball(20, 3, seed).unwrap());
        prop_assert_eq!(gen_klines(2, 10, 3, 0.01, seed).unwrap(), gen_klines(2, 10, 3, 0.01, seed).unwrap());
        prop_assert_eq!(gen_sphere_packing(2, 0.6, seed).unwrap(), gen_sphere_packing(2, 0.6, seed).unwrap());
    }
}

#[test]
fn full_selection_has_zero_hausdorff() {
    let ps = gen_uniform_ball(30, 3, 1).unwrap();
    let acc = DotAccess::from(&ps);
    let all: Vec<usize> = (0..30).collect();
    assert_eq!(hausdorff_one_sided(&acc, &all, HausdorffMode::Oracle).unwrap(), 0.0);
}

#[test]
fn report_summarizes_a_run() {
    let ps = gen_uniform_ball(40, 2, 2).unwrap();
    let acc = DotAccess::from(&ps);
    let h = greedy_cluster(&acc, 1e-3, Engine::Fast).unwrap();
    let r = evaluate(&acc, &h, HausdorffMode::Oracle, 1e-3).unwrap();
    assert_eq!(r.method, EvalMethod::Oracle);
    assert_eq!(r.selected_size, h.selected.len());
    assert!(r.hausdorff_one_sided >= 0.0);
    assert!(r.max_code_support >= 1 && r.mean_code_support >= 1.0);
}

#[test]
fn collinear_klines_planted_certificate_is_exact() {
    let (ps, meta) = gen_klines(2, 100, 5, 0.0, 21).unwrap();
    assert_eq!(meta.certificate.len(), 4);
    let acc = DotAccess::from(&ps);
    assert!(hausdorff_one_sided(&acc, &meta.certificate, HausdorffMode::Oracle).unwrap() < 1e-9);
}

#[test]
fn strip_klines_certificate_within_twice_the_strip() {
    let strip = 1e-3;
    let (ps, meta) = gen_klines(3, 300, 10, strip, 7).unwrap();
    assert_eq!(meta.labels.len(), 300);
    let mut worst = 0.0_f64;
    for i in 0..ps.len() {
        let d = exact_project_oracle_among(ps.point(i), &ps, &meta.certificate).unwrap().distance;
        worst = worst.max(d);
    }
    assert!(worst <= 2.0 * strip, "{worst}");
    // every point stays within the strip of its own segment
    for (i, &line) in meta.labels.iter().enumerate() {
        let seg = &meta.segments[line];
        let u: Vec<f64> = seg.end.iter().zip(&seg.start).map(|(b, a)| b - a).collect();
        let rel: Vec<f64> = ps.point(i).iter().zip(&seg.start).map(|(p, a)| p - a).collect();
        let t = (rel.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() / u.iter().map(|x| x * x).sum::<f64>()).clamp(0.0, 1.0);
        let foot: Vec<f64> = seg.start.iter().zip(&u).map(|(a, y)| a + t * y).collect();
        assert!(dist_sq(ps.point(i), &foot).sqrt() <= strip + 1e-12);
    }
}

#[test]
fn circle_packing_count_and_spacing() {
    for seed in 0..5 {
        let ps = gen_sphere_packing(2, 0.5, seed).unwrap();
        assert!((8..=13).contains(&ps.len()), "seed {seed}: {}", ps.len());
        for i in 0..ps.len() {
            for j in 0..i {
                assert!(dist_sq(ps.point(i), ps.point(j)).sqrt() >= 0.5);
            }
        }
    }
}

#[test]
fn sphere_packing_points_are_strict_hull_vertices() {
    let ps = gen_sphere_packing(3, 0.4, 9).unwrap();
    let n = ps.len();
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let d = exact_project_oracle_among(ps.point(i), &ps, &others).unwrap().distance;
        assert!(d > 0.015, "point {i}: {d}");
    }
}

#[test]
fn uniform_ball_norms() {
    let ps = gen_uniform_ball(10_000, 2, 77).unwrap();
    assert!(ps.rows().all(|p| norm(p) <= 1.0));
    let mean = ps.rows().map(norm).sum::<f64>() / ps.len() as f64;
    assert!((mean - 2.0 / 3.0).abs() <= 0.02);
}
