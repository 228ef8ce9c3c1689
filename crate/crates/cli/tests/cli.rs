use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpq")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_hadamard(dir: &Path, n: u32) -> String {
    let path = dir.join(format!("H{n}.mat"));
    fs::write(&path, stdout(&lpq(&["construct", "hadamard", "--n", &n.to_string()]))).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn construct_h1() {
    assert_eq!(stdout(&lpq(&["construct", "hadamard", "--n", "1"])), "2 2\n1 1\n1 -1\n");
}

#[test]
fn norm_of_h2_at_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let h2 = write_hadamard(dir.path(), 2);
    let v: Value = serde_json::from_str(&stdout(&lpq(&["norm", &h2, "--p", "1", "--q", "inf"]))).unwrap();
    assert_eq!(v["exact"].as_f64(), Some(1.0));
    assert!((v["lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["paper_anchor"].is_string());
    let v: Value = serde_json::from_str(&stdout(&lpq(&["norm", &h2, "--p", "2", "--q", "2"]))).unwrap();
    assert!((v["exact"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((v["upper"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn malformed_matrix_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mat");
    fs::write(&bad, "2 2\n1 x\n0 1\n").unwrap();
    let out = lpq(&["norm", bad.to_str().unwrap(), "--p", "1", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let missing = lpq(&["norm", "/nonexistent/A.mat", "--p", "1", "--q", "2"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bad_exponent_exits_2() {
    assert_eq!(lpq(&["construct", "u-block", "--n", "2", "--p", "0.5", "--q", "4"]).status.code(), Some(2));
    assert_eq!(lpq(&["construct", "u-block", "--n", "2", "--p", "4", "--q", "4"]).status.code(), Some(2));
}

fn growth_rows(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,N,delta_upper,constant_lower,robust_lower,perturbation_radius"));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn certify_grows_like_root_four_of_n() {
    let out = lpq(&["certify", "--p", "4/3", "--q", "4", "--r", "2", "--n-max", "6"]);
    let rows = growth_rows(&stdout(&out));
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let expect = 2f64.powf(row[0] / 4.0);
        assert!(row[3] >= expect - 1e-9, "n = {}: {} < {expect}", row[0], row[3]);
        assert!(row[4] <= row[3]);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("obstructed"));
}

#[test]
fn certify_outside_obstruction_is_empty() {
    let out = lpq(&["certify", "--p", "4/3", "--q", "4", "--r", "4", "--n-max", "3"]);
    assert!(growth_rows(&stdout(&out)).is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("factorable"));

    let v: Value =
        serde_json::from_str(&stdout(&lpq(&["certify", "--p", "4/3", "--q", "4", "--r", "4", "--n-max", "3", "--format", "json"])))
            .unwrap();
    assert_eq!(v["classification"], "factorable");
    for e in v["explicit"].as_array().unwrap() {
        assert!(e["product_norm_upper"].as_f64().unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn certify_zero_rows() {
    let out = lpq(&["certify", "--p", "4/3", "--q", "4", "--r", "2", "--n-max", "0"]);
    assert!(growth_rows(&stdout(&out)).is_empty());
}

#[test]
fn sweep_matches_certify() {
    let args = ["--p", "1", "--q", "2", "--r", "3/2", "--n-max", "4"];
    let certify = stdout(&lpq(&[&["certify"][..], &args].concat()));
    let sweep = stdout(&lpq(&[&["sweep", "--family", "u-block"][..], &args].concat()));
    assert_eq!(certify, sweep);
}

#[test]
fn verify_hadamard_suite() {
    let v: Value = serde_json::from_str(&stdout(&lpq(&["verify", "--suite", "hadamard"]))).unwrap();
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["paper_anchor"].as_str().unwrap().contains("H_n H_n = N I")));
    assert!(checks.iter().all(|c| c.get("runtime_ms").is_none()));
}

#[test]
fn verify_all_passes() {
    let v: Value = serde_json::from_str(&stdout(&lpq(&["verify"]))).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn unknown_suite_exits_2() {
    assert_eq!(lpq(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

fn read_mat(path: &Path) -> (usize, usize, Vec<f64>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let dims: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    let data = lines.flat_map(|l| l.split_whitespace().map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>()).collect();
    (dims[0], dims[1], data)
}

#[test]
fn split_writes_exact_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("R.mat");
    let n = 10;
    let mut text = format!("{n} {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", 1.0 / (1.0 + (i as f64 - j as f64).powi(2)))).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    fs::write(&r, text).unwrap();
    let out_dir = dir.path().join("out");
    let summary: Value = serde_json::from_str(&stdout(&lpq(&[
        "split",
        r.to_str().unwrap(),
        "--eps",
        "0.1",
        "--p",
        "4/3",
        "--q",
        "4",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(summary["exact"], true);
    assert!(summary["certified_error"].as_f64().unwrap() <= 0.1);
    let (_, _, s) = read_mat(&out_dir.join("S.mat"));
    let (_, _, w) = read_mat(&out_dir.join("W.mat"));
    let (_, _, v) = read_mat(&out_dir.join("V.mat"));
    for ((s, w), v) in s.iter().zip(&w).zip(&v) {
        assert_eq!(*s, w + v);
    }
    let cuts: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("cuts.json")).unwrap()).unwrap();
    assert_eq!(cuts, summary);
    assert_eq!(cuts["k_cuts"].as_array().unwrap().last().unwrap(), n);
}

#[test]
fn bernstein_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("I16.mat");
    fs::write(&path, stdout(&lpq(&["construct", "identity", "--size", "16"]))).unwrap();
    let v: Value =
        serde_json::from_str(&stdout(&lpq(&["bernstein", path.to_str().unwrap(), "--k", "16", "--p", "1", "--q", "2"]))).unwrap();
    assert!((v["upper"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["lower"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = write_hadamard(dir.path(), 3);
    for args in [
        vec!["norm", h3.as_str(), "--p", "3/2", "--q", "3"],
        vec!["verify", "--suite", "fss"],
        vec!["bernstein", h3.as_str(), "--k", "3", "--p", "2", "--q", "4"],
    ] {
        assert_eq!(stdout(&lpq(&args)), stdout(&lpq(&args)), "{args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let out = lpq(&["construct", "u-block", "--n", "2", "--p", "2", "--q", "2", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(stdout(&out).is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["rows"], 4);
    assert!((v["data"][0].as_f64().unwrap() - 0.5).abs() < 1e-15);
}
