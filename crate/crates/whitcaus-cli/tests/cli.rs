use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whitcaus")).args(args).output().expect("binary runs")
}

/// Runs with `--json`, checks the report schema and returns (exit code, report).
fn report(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().next().unwrap_or_else(|| panic!("no output; stderr: {}", String::from_utf8_lossy(&out.stderr)));
    let v: Value = serde_json::from_str(line).unwrap();
    schema(&v);
    (out.status.code().unwrap(), v)
}

fn schema(v: &Value) {
    for key in ["command", "inputs", "outputs", "checks", "pass", "wall_time_s"] {
        assert!(v.get(key).is_some(), "missing {key}: {v}");
    }
    assert!(v["pass"].is_boolean() && v["wall_time_s"].is_f64() && v["command"].is_string());
    for c in v["checks"].as_array().unwrap() {
        assert!(c["name"].is_string() && c["pass"].is_boolean() && c.get("value").is_some() && c.get("expected").is_some());
    }
    // round trip
    let again: Value = serde_json::from_str(&v.to_string()).unwrap();
    assert_eq!(&again, v);
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("whitcaus-cli-{}-{name}", std::process::id()))
}

#[test]
fn zone_examples() {
    let (code, v) = report(&["zone", "--y1", "0.257", "--y2", "0.129"]);
    assert_eq!((code, v["outputs"]["zone"].as_str().unwrap()), (0, "Light1"));
    assert!(v["outputs"]["defect1"].as_f64().unwrap() < 0.0 && v["outputs"]["defect2"].as_f64().unwrap() < 0.0);
    let (_, v) = report(&["zone", "--y1", "1", "--y2", "1"]);
    assert_eq!(v["outputs"]["zone"], "Shadow");
    let (_, v) = report(&["zone", "--exact", "--y1sq", "1/3", "--y2sq", "1/3"]);
    assert_eq!(v["outputs"]["zone"], "CuspPoint");
    assert_eq!(v["outputs"]["defect2"], 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["zone", "--y1", "-0.5", "--y2", "0.3"][..],
        &["zone", "--y1", "0", "--y2", "0.3"],
        &["zone", "--exact", "--y1sq", "1/3"],
        &["zone", "--exact", "--y1sq", "x", "--y2sq", "1/3"],
        &["whittaker", "--n", "4", "--t", "1", "--y1", "0.2", "--y2", "0.2"],
        &["scan", "--mode", "zones", "--grid", "1:0:0.1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_whitcaus"))
        .args(["zone", "--y1", "0.2", "--y2", "0.2"])
        .env("WHITCAUS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fiber_examples() {
    let (code, v) = report(&["fiber", "--exact", "--y1sq", "1/3", "--y2sq", "1/3"]);
    assert_eq!(code, 0);
    let pts = v["outputs"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    assert!(pts.iter().all(|p| p["multiplicity"] == 3 && p["degeneracy"] == "CuspA3"));
    let (_, v) = report(&["fiber", "--y1", "0.525", "--y2", "0.382", "--tol", "1e-2"]);
    assert_eq!(v["outputs"]["count"], 4);
    let (_, v) = report(&["fiber", "--y1", "2", "--y2", "2"]);
    assert_eq!(v["outputs"]["count"], 0);
    // text mode
    let out = run(&["fiber", "--y1", "0.257", "--y2", "0.129"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("count: 6"));
}

/// `K_{iτ}(z)` by Simpson on `∫₀^∞ e^{−z cosh θ} cos(τθ) dθ`.
fn bessel_k(tau: f64, z: f64) -> f64 {
    let top = ((40.0 + z) / z).acosh() + 1.0;
    let n = ((top * (tau + z) * 40.0) as usize).max(2000) & !1;
    let h = top / n as f64;
    let f = |th: f64| (-z * th.cosh()).exp() * (tau * th).cos();
    let mut s = f(0.0) + f(top);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn gl2_whittaker_matches_bessel() {
    let tau = 5.0;
    // |W(y)| = 2π^{1/2} |Γ(1/2+iτ)|^{-1} √y |K_{iτ}(2πy)|, |Γ(1/2+iτ)|² = π/cosh(πτ)
    let c = 2.0 * PI.sqrt() * ((PI * tau).cosh() / PI).sqrt();
    for y in [0.2f64, 0.6, 1.0, 2.0] {
        let (code, v) = report(&["whittaker", "--n", "2", "--t", "5", "--y1", &y.to_string(), "--tol", "1e-9"]);
        assert_eq!(code, 0);
        let expect = c * y.sqrt() * bessel_k(tau, 2.0 * PI * y).abs();
        let got = v["outputs"]["abs"].as_f64().unwrap();
        assert!((got / expect - 1.0).abs() < 1e-6, "y={y}: {got} {expect}");
    }
}

#[test]
fn gl3_whittaker_cusp_and_shadow() {
    let (code, v) = report(&["whittaker", "--n", "3", "--t", "20", "--exact", "--y1sq", "1/3", "--y2sq", "1/3", "--predict", "pearcey"]);
    assert_eq!(code, 0);
    let o = &v["outputs"];
    let abs = o["abs"].as_f64().unwrap();
    assert!((o["abs_over_t34"].as_f64().unwrap() - abs / 20f64.powf(0.75)).abs() < 1e-12);
    assert_eq!(o["in_cusp_window"], true);
    assert!(o["rel_diff"].as_f64().unwrap() < 0.2);
    let (code, v) = report(&["whittaker", "--n", "3", "--t", "20", "--y1", "1.2", "--y2", "1.2"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["rapid_decay_expected"], true);
    assert!(v["outputs"]["abs"].as_f64().unwrap() < 1e-4 * abs);
    let (code, v) = report(&["whittaker", "--n", "3", "--t", "40", "--y1", "0.2", "--y2", "0.15", "--predict", "morse"]);
    assert_eq!(code, 0);
    assert!(v["outputs"]["rel_diff"].as_f64().unwrap() < 0.1);
    // Morse is refused at a degenerate point
    let out = run(&["whittaker", "--n", "3", "--t", "20", "--exact", "--y1sq", "1/3", "--y2sq", "1/3", "--predict", "morse"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_suites() {
    let (code, v) = report(&["verify", "--suite", "caustics"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = report(&["verify", "--suite", "gl2"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = report(&["verify", "--suite", "stade"]);
    assert_eq!(code, 0, "{v}");
    // the stated amplitude ratio is the one failing check
    let (code, v) = report(&["verify", "--suite", "hessian"]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(failed, vec!["amplitude ratio"]);
}

#[test]
fn zones_scan_follows_the_caustics() {
    let path = tmp("zones.csv");
    let (code, v) = report(&["scan", "--mode", "zones", "--grid", "0:1.2:0.02", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["y1", "y2", "zone", "defect1", "defect2", "fiber_count"]);
    let mut n = 0;
    for rec in rdr.records() {
        let r = rec.unwrap();
        let f = |i: usize| r[i].parse::<f64>().unwrap();
        let (y1, y2, d1, d2) = (f(0), f(1), f(3), f(4));
        assert!((d1 - (y1 * y1 + y2 * y2 - 1.0)).abs() < 1e-12);
        let expect = if d1 > 0.0 {
            "Shadow"
        } else if d1 == 0.0 {
            "Caustic1"
        } else if d2 < 0.0 {
            "Light1"
        } else {
            "Light2"
        };
        assert_eq!(&r[2], expect, "({y1}, {y2})");
        n += 1;
    }
    assert_eq!(n, 60 * 60);
    assert_eq!(v["outputs"]["rows"], 3600);
    std::fs::remove_file(path).ok();
}

#[test]
fn gl2_supnorm_scan() {
    let path = tmp("supnorm.csv");
    let (code, v) = report(&["scan", "--mode", "supnorm", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((v["outputs"]["slope"].as_f64().unwrap() - 1.0 / 6.0).abs() < 0.05);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "y1", "y2", "absW", "err"]);
    assert_eq!(rdr.records().count(), v["outputs"]["rows"].as_u64().unwrap() as usize);
    std::fs::remove_file(path).ok();
}

#[test]
fn single_thread_gives_identical_output() {
    let a = run(&["scan", "--mode", "zones", "--grid", "0:1:0.1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_whitcaus"))
        .args(["scan", "--mode", "zones", "--grid", "0:1:0.1"])
        .env("WHITCAUS_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stderr).unwrap().starts_with("scan"));
}
