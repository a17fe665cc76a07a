use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singular-nls")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn spectrum_examples() {
    let out = run(&["spectrum", "--delta", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["result"]["eigenvalues"], serde_json::json!([-1.0]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["interaction"]["sigma"], -2.0);

    let v = report(&run(&["spectrum", "--delta", "1"]));
    assert_eq!(v["result"]["eigenvalues"], serde_json::json!([]));

    let v = report(&run(&["spectrum", "--two-delta", "-1", "--a", "1"]));
    let ev = v["result"]["eigenvalues"].as_array().unwrap();
    assert_eq!(ev.len(), 1);
    // κ solves 2κ = 1 + e^{-2κ}
    let k = -ev[0].as_f64().unwrap();
    let kappa = k.sqrt();
    assert!((2.0 * kappa - 1.0 - (-2.0 * kappa).exp()).abs() < 1e-12);
    assert_eq!(v["result"]["excluded_parameter_line"], true);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["spectrum"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--two-delta", "-1", "--a", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["evolve", "--rho", "3"]).status.code(), Some(2));
    assert_eq!(run(&["periodic-evolve", "--u0", "not json"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn io_failure_exits_with_three() {
    assert_eq!(run(&["spectrum", "--config", "/nonexistent/run.json"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let prefix = blocker.join("out");
    assert_eq!(run(&["spectrum", "--delta", "-2", "-o", prefix.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn contraction_failure_exits_with_four() {
    let out = run(&["periodic-evolve", "--u0", "[[0,5,0]]", "--mu", "[]", "--rho", "3", "--t-max", "0.3"]);
    assert_eq!(out.status.code(), Some(4));
    let v = report(&out);
    assert!(v["error"].as_str().unwrap().contains("contraction failed"));
    assert!(v["last_ratio"].as_f64().unwrap() > 1.0);
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn config_file_with_flag_override_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"interaction": {"kind": "delta", "sigma": 2.0}, "grid": {"half_width": 30.0, "spacing": 0.02}, "t": 0.4}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for prefix in [&a, &b] {
        let out = run(&["propagate", "--config", cfg.to_str().unwrap(), "--delta", "1", "-o", prefix.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&a.with_extension("json")), read(&b.with_extension("json")));
    assert_eq!(read(&a.with_extension("csv")), read(&b.with_extension("csv")));
    let v: Value = serde_json::from_str(&read(&a.with_extension("json"))).unwrap();
    assert_eq!(v["config"]["interaction"]["sigma"], 1.0);
    assert_eq!(v["config"]["t"], 0.4);
    assert_eq!(v["result"]["method"], "closed_form");
    assert!(v["result"]["norm_drift"].as_f64().unwrap() < 1e-4);

    let csv = read(&a.with_extension("csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,re,im,abs"));
    assert_eq!(lines.count(), 3001);
    // 17 significant digits
    let first = csv.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first, "-3.0000000000000000e1");
}

#[test]
fn decay_scan_verdicts() {
    let data = ["--center", "-1", "--width", "16"];
    let out = run(&[&["decay-scan", "--delta", "0"][..], &data].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["result"]["verdict"], "pass");
    assert!((v["result"]["fitted_slope"].as_f64().unwrap() + 0.5).abs() < 0.02);

    let small = ["--half-width", "600", "--t-end", "20", "--n-times", "6"];
    let out = run(&[&["decay-scan", "--delta", "-1"][..], &data, &small].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["verdict"], "no-decay (bound state)");
}

#[test]
fn decay_scan_repulsive_delta() {
    let out = run(&["decay-scan", "--delta", "1", "--center", "-1", "--width", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert!((v["result"]["fitted_slope"].as_f64().unwrap() + 0.5).abs() < 0.05);
}

#[test]
fn evolve_examples() {
    let out = run(&["evolve"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = report(&out);
    let eps = v["result"]["eps"].as_f64().unwrap();
    assert!(v["result"]["final_weighted_norm"].as_f64().unwrap() <= 2.0 * eps);
    assert!(v["result"]["ratios"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() <= 0.6));

    let v = report(&run(&["periodic-evolve", "--lambda-sign", "0", "--mu", "[]"]));
    assert!(v["result"]["linear_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["passed"], true);

    let out = run(&["periodic-evolve", "--galerkin-modes", "16", "--panels", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["galerkin_max_gap"].as_f64().unwrap() < 1e-5);

    let out = run(&["evolve", "--solver", "measure"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["converged"], true);
}

#[test]
fn lorentz_norm_against_closed_form() {
    let out = run(&["lorentz-norm", "--delta", "-2", "--data", "bound-state", "--p", "1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert!((v["result"]["lorentz_norm"].as_f64().unwrap() - 2.0).abs() < 5e-3);
    let v = report(&run(&["lorentz-norm", "--p", "2", "--q", "inf"]));
    assert_eq!(v["result"]["q"], "inf");
}

#[test]
fn verify_subset() {
    let out = run(&["verify", "--only", "1,2,8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["result"]["criteria"].as_array().unwrap().len(), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.contains("[PASS]")).count(), 3);
}
