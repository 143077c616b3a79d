use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hullcore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hullcore")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn collinear_input_keeps_two_endpoints() {
    let dir = TempDir::new().unwrap();
    let rows: String = (0..40).map(|i| format!("{},{},{}\n", i as f64, 2.0 * i as f64, -(i as f64))).collect();
    let input = write(&dir, "line.csv", &rows);
    let out = dir.path().join("r.json");
    for engine in ["naive", "fast"] {
        let o = hullcore(&["compress", "--input", s(&input), "--eps", "0.001", "--engine", engine, "--output", s(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let mut sel: Vec<u64> = json(&out)["selected"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        sel.sort();
        assert_eq!(sel, vec![0, 39]);
    }
}

#[test]
fn cover_on_square_corners_keeps_all_four() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "sq.csv", "x,y\n1,1\n-1,1\n-1,-1\n1,-1\n");
    let out = dir.path().join("r.json");
    let o = hullcore(&[
        "compress", "--algo", "cover", "--input", s(&input), "--skip-header", "--eps", "0.05", "--delta", "1.0",
        "--output", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out);
    assert_eq!(r["selected"].as_array().unwrap().len(), 4);
    assert_eq!(r["stats"]["bound"].as_f64().unwrap(), 0.1);
    assert!(r["transform"].is_object());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("ball.csv");
    assert_eq!(code(&hullcore(&["gen", "ball", "--n", "200", "--d", "4", "--seed", "5", "--output", s(&data)])), 0);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        assert_eq!(code(&hullcore(&["compress", "--input", s(&data), "--eps", "0.001", "--output", s(out)])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = dir.path().join("ball2.csv");
    assert_eq!(code(&hullcore(&["gen", "ball", "--n", "200", "--d", "4", "--seed", "5", "--output", s(&c)])), 0);
    assert_eq!(fs::read(&data).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn generators_write_data_and_metadata() {
    let dir = TempDir::new().unwrap();
    let kl = dir.path().join("kl.bin");
    let o = hullcore(&[
        "gen", "klines", "--k", "3", "--n", "90", "--d", "5", "--strip", "0.01", "--seed", "2", "--format", "bin",
        "--output", s(&kl),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&kl).unwrap().len(), 16 + 90 * 5 * 8);
    let meta = json(&dir.path().join("kl.meta.json"));
    assert_eq!(meta["kind"], "klines");
    assert_eq!(meta["klines"]["certificate"].as_array().unwrap().len(), 6);

    let pk = dir.path().join("pk.csv");
    assert_eq!(code(&hullcore(&["gen", "packing", "--d", "2", "--spacing", "0.5", "--output", s(&pk)])), 0);
    let n = json(&dir.path().join("pk.meta.json"))["n"].as_u64().unwrap();
    assert_eq!(fs::read_to_string(&pk).unwrap().lines().count() as u64, n);
}

#[test]
fn normalize_writes_points_in_the_unit_ball() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "raw.csv", "10,10\n14,10\n12,13\n");
    let out = dir.path().join("norm.csv");
    assert_eq!(code(&hullcore(&["normalize", "--input", s(&input), "--output", s(&out)])), 0);
    for line in fs::read_to_string(&out).unwrap().lines() {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[0].hypot(v[1]) <= 1.0 + 1e-12);
    }
    let t = json(&dir.path().join("norm.transform.json"));
    assert_eq!(t["center"], serde_json::json!([12.0, 11.5]));
}

#[test]
fn generate_compress_eval_round_trip() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("kl.csv");
    let gen = ["gen", "klines", "--k", "3", "--n", "150", "--d", "3", "--strip", "0.001", "--seed", "4"];
    assert_eq!(code(&hullcore(&[&gen[..], &["--output", s(&data)]].concat())), 0);
    let result = dir.path().join("r.json");
    assert_eq!(code(&hullcore(&["compress", "--input", s(&data), "--eps", "0.001", "--output", s(&result)])), 0);
    let report = dir.path().join("e.json");
    let o = hullcore(&["eval", s(&result), "--input", s(&data), "--output", s(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&report);
    assert_eq!(r["method"], "oracle");
    let h = r["hausdorff_one_sided"].as_f64().unwrap();
    assert!(h <= r["bound"].as_f64().unwrap() + 1e-9, "{r}");
    assert!(r["max_code_support"].as_u64().unwrap() >= 1);

    let off = hullcore(&["eval", s(&result), "--input", s(&data), "--oracle", "off"]);
    assert_eq!(code(&off), 0);
    let approx: Value = serde_json::from_slice(&off.stdout).unwrap();
    assert_eq!(approx["method"], "approximate");
    assert!(approx["hausdorff_one_sided"].as_f64().unwrap() >= h - 1e-9);

    let codes = hullcore(&["encode", s(&result), "--input", s(&data)]);
    assert_eq!(code(&codes), 0);
    let codes: Value = serde_json::from_slice(&codes.stdout).unwrap();
    assert_eq!(codes["codes"].as_array().unwrap().len(), 150);
}

#[test]
fn gram_input_gives_the_same_selection_without_transform() {
    let dir = TempDir::new().unwrap();
    let pts = [[0.6, 0.0], [-0.3, 0.5], [-0.3, -0.5], [0.0, 0.1], [0.1, -0.1]];
    let gram: String = pts
        .iter()
        .map(|a| pts.iter().map(|b| (a[0] * b[0] + a[1] * b[1]).to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let g = write(&dir, "g.csv", &gram);
    let o = hullcore(&["compress", "--gram", s(&g), "--eps", "0.001"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["transform"].is_null());
    let mut sel: Vec<u64> = r["selected"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    sel.sort();
    assert_eq!(sel, vec![0, 1, 2]);
}

#[test]
fn malformed_input_exits_with_2_and_names_the_row() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.csv", "1,2\n3,oops\n");
    let o = hullcore(&["compress", "--input", s(&input), "--eps", "0.01"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));

    let ragged = write(&dir, "ragged.csv", "1,2\n3,4,5\n");
    assert_eq!(code(&hullcore(&["compress", "--input", s(&ragged), "--eps", "0.01"])), 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&hullcore(&["compress", "--input", s(&missing), "--eps", "0.01"])), 2);
}

#[test]
fn eval_rejects_mismatched_data() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.csv", "0,0\n1,0\n0,1\n1,1\n");
    let result = dir.path().join("r.json");
    assert_eq!(code(&hullcore(&["compress", "--input", s(&input), "--eps", "0.01", "--output", s(&result)])), 0);
    let wide = write(&dir, "wide.csv", "0,0,0\n1,0,0\n");
    assert_eq!(code(&hullcore(&["eval", s(&result), "--input", s(&wide)])), 2);
    let short = write(&dir, "short.csv", "0,0\n1,0\n");
    let o = hullcore(&["eval", s(&result), "--input", s(&short)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
}

#[test]
fn bad_configuration_exits_with_4() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.csv", "0,0\n1,0\n");
    let i = s(&input);
    for args in [
        vec!["compress", "--input", i, "--eps", "1.5"],
        vec!["compress", "--input", i, "--eps", "0"],
        vec!["compress", "--input", i],
        vec!["compress", "--input", i, "--eps", "0.1", "--algo", "cover", "--delta", "1.5"],
        vec!["compress", "--input", i, "--eps", "0.1", "--algo", "cover"],
        vec!["compress", "--input", i, "--eps", "0.1", "--engine", "turbo"],
        vec!["compress", "--input", i, "--eps", "0.1", "--no-such-flag"],
        vec!["gen", "ball", "--n", "10", "--d", "2"],
    ] {
        let o = hullcore(&args);
        assert_eq!(code(&o), 4, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = hullcore(&["compress", "--input", i, "--eps", "7"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--eps"));
}
