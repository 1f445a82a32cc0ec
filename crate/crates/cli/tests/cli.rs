use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn faber(args: &[&str]) -> Output {
    faber_with_threads(args, "0")
}

fn faber_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faber"))
        .args(args)
        .env("FABER_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = faber(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

fn write_samples(dir: &Path, level: u32, k_lo: i64, k_hi: i64, f: impl Fn(f64) -> f64) -> String {
    let mut text = format!("N,k_lo,k_hi\n{level},{k_lo},{k_hi}\nk,value\n");
    for k in k_lo..=k_hi {
        text += &format!("{k},{:?}\n", f(k as f64 / (level as f64).exp2()));
    }
    let path = dir.join("samples.csv");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn coefficient_table() {
    let v: Value = serde_json::from_str(&ok(&["coeffs", "--m", "2", "--window", "20"])).unwrap();
    let a1 = v["coeffs"].as_array().unwrap().iter().find(|e| e["n"] == 1).unwrap()["a"].as_f64().unwrap();
    assert!((a1 + 0.866025).abs() < 1e-6);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 41);
    for key in ["m", "tolerance", "truncation_bound", "version"] {
        assert!(v["provenance"].get(key).is_some(), "{key}");
    }
    assert_eq!(v["sequence"]["fractions"][2], "1/4");
    assert_eq!(v["roots"]["inside"].as_array().unwrap().len(), 2);
}

#[test]
fn invalid_order_is_a_validation_error() {
    assert_eq!(faber(&["coeffs", "--m", "1"]).status.code(), Some(2));
    assert_eq!(faber(&["coeffs", "--m", "2", "--window", "0"]).status.code(), Some(2));
    assert_eq!(faber(&["coeffs", "--m", "2", "--tolerance", "0"]).status.code(), Some(2));
    assert_eq!(faber(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cardinal_interpolant_on_integers() {
    let rows = csv_rows(&ok(&["basis", "--m", "2", "--which", "L", "--grid", "-3:3:1"]));
    for r in rows {
        let want = if r[0] == 0.0 { 1.0 } else { 0.0 };
        assert!((r[1] - want).abs() < 1e-12, "{r:?}");
    }
    assert_eq!(faber(&["basis", "--m", "2", "--grid", "0:1:0.5"]).status.code(), Some(2));
}

#[test]
fn analyze_then_synthesize_interpolates() {
    let dir = TempDir::new().unwrap();
    let samples = write_samples(dir.path(), 4, -20, 20, bump);
    let coeffs = dir.path().join("coeffs.json");
    ok(&["analyze", "--m", "2", "--in", &samples, "--out", coeffs.to_str().unwrap()]);
    let text = ok(&["synthesize", "--coeffs", coeffs.to_str().unwrap(), "--grid", "-1.5:1.5:0.0625"]);
    for r in csv_rows(&text) {
        assert!((r[1] - bump(r[0])).abs() < 1e-12, "{r:?}");
    }
    let v: Value = serde_json::from_str(&ok(&[
        "norm", "--space", "f", "--r", "2", "--p", "2", "--theta", "2", "--coeffs", coeffs.to_str().unwrap(),
    ]))
    .unwrap();
    let f = v["norm"].as_f64().unwrap();
    let v: Value = serde_json::from_str(&ok(&[
        "norm", "--space", "b", "--r", "2", "--p", "2", "--theta", "2", "--coeffs", coeffs.to_str().unwrap(),
    ]))
    .unwrap();
    assert!((v["norm"].as_f64().unwrap() - f).abs() < 1e-12 * f);
    assert!(v["warning"].is_null());
    let out = faber(&["norm", "--space", "f", "--r", "2", "--p", "inf", "--theta", "2", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "N,k_lo,k_hi\n3,0,2\nk,value\n0,1\n1,1\n").unwrap();
    let out = faber(&["analyze", "--m", "2", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 3 samples"));
    let json = dir.path().join("bad.json");
    std::fs::write(&json, "{\"m\": 2}").unwrap();
    let out = faber(&["synthesize", "--coeffs", json.to_str().unwrap(), "--grid", "0:1:0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = faber(&["analyze", "--m", "2", "--in", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wavelet_round_trip_of_a_hat() {
    let dir = TempDir::new().unwrap();
    let hat = dir.path().join("hat.json");
    std::fs::write(
        &hat,
        r#"{"breakpoints":[[0,1],[1,2],[1,1]],"pieces":[[[0,1],[2,1]],[[1,1],[-2,1]]]}"#,
    )
    .unwrap();
    let coeffs = dir.path().join("mu.json");
    ok(&["wavelet-analyze", "--m", "2", "--exact", hat.to_str().unwrap(), "--max-level", "1", "--out", coeffs.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&coeffs).unwrap()).unwrap();
    assert_eq!(v["kind"], "wavelet");
    let text = ok(&["wavelet-synthesize", "--coeffs", coeffs.to_str().unwrap(), "--grid", "-1:2:0.125"]);
    for r in csv_rows(&text) {
        let want = if (0.0..0.5).contains(&r[0]) { 2.0 * r[0] } else if (0.5..1.0).contains(&r[0]) { 2.0 - 2.0 * r[0] } else { 0.0 };
        assert!((r[1] - want).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn sampled_wavelet_coefficients_need_fine_samples() {
    let dir = TempDir::new().unwrap();
    let samples = write_samples(dir.path(), 3, -8, 8, bump);
    let out = faber(&["wavelet-analyze", "--m", "2", "--in", &samples, "--max-level", "3"]);
    assert_eq!(out.status.code(), Some(2));
    ok(&["wavelet-analyze", "--m", "2", "--in", &samples]);
}

#[test]
fn probe_outside_the_range_warns_but_succeeds() {
    let out = faber(&["probe", "--family", "bump", "--m", "2", "--r", "5", "--p", "2", "--theta", "2", "--levels", "3:4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["warning"].as_str().unwrap().contains("outside"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let v: Value = serde_json::from_str(&ok(&["probe", "--family", "bspline", "--m", "2", "--r", "2", "--p", "2", "--theta", "2"])).unwrap();
    assert!(v["warning"].is_null());
    assert_eq!(faber(&["probe", "--family", "sine", "--m", "2", "--r", "1", "--p", "2", "--theta", "2"]).status.code(), Some(2));
}

#[test]
fn convergence_table() {
    let rows = csv_rows(&ok(&["convergence", "--family", "bspline", "--m", "2", "--format", "csv"]));
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| (r[2] - 4.0).abs() < 0.3), "{rows:?}");
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let samples = write_samples(dir.path(), 6, -70, 70, bump);
    for args in [
        vec!["analyze", "--m", "3", "--in", samples.as_str()],
        vec!["wavelet-analyze", "--m", "2", "--in", samples.as_str()],
        vec!["basis", "--m", "3", "--j", "1", "--k", "-1", "--grid", "-4:4:0.01"],
        vec!["probe", "--family", "gaussian", "--m", "2", "--space", "f", "--r", "1", "--p", "1.5", "--theta", "3"],
    ] {
        let one = faber_with_threads(&args, "1");
        let many = faber_with_threads(&args, "4");
        assert!(one.status.success());
        assert_eq!(one.stdout, many.stdout, "{args:?}");
    }
    assert_eq!(faber_with_threads(&["coeffs", "--m", "2"], "lots").status.code(), Some(2));
}
