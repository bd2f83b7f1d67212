use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grid-extremal"))
        .args(args)
        .env_remove("GRID_EXTREMAL_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn constant_values_and_domain() {
    assert_eq!(num(&json(&["constant", "--alpha", "0"])["closed"]), 0.0);
    let v = json(&["constant", "--alpha", "0.5"]);
    assert!((num(&v["closed"]) - 0.1308120359).abs() < 1e-9);
    let all = json(&["constant", "--alpha", "0.3", "--route", "all"]);
    assert!(num(&all["max_abs_difference"]) < 1e-8);
    assert_eq!(run(&["constant", "--alpha", "1"]).status.code(), Some(2));
}

#[test]
fn measure_table() {
    let v = json(&["measure", "--alpha", "0.6", "--points", "5"]);
    let rows = v["rows"].as_array().unwrap();
    // five Chebyshev points plus +-0.8
    assert_eq!(rows.len(), 7);
    let centre = rows.iter().find(|r| num(&r["x"]) == 0.0).unwrap();
    assert!((num(&centre["density"]) - 0.2048328).abs() < 1e-7);
    for r in rows {
        if num(&r["x"]).abs() >= 0.8 - 1e-12 {
            assert_eq!(num(&r["density"]), 0.5);
        }
    }
    assert!((num(&rows.last().unwrap()["cdf"]) - 0.6).abs() < 1e-12);
    assert_eq!(run(&["measure", "--alpha", "0.6", "--points", "1"]).status.code(), Some(2));
}

#[test]
fn extremal_small_and_structure() {
    let v = json(&["extremal", "--n", "3", "--alpha", "0.67", "--emit-poly"]);
    assert!((num(&v["ratio"]) - 1.25).abs() < 1e-9);
    assert_eq!(v["poly"]["basis"], "chebyshev");
    let s = json(&["extremal", "--n", "40", "--alpha", "0.5", "--structure"]);
    assert_eq!(s["structure"]["separation_ok"], true);
    assert!(s.get("poly").is_none());
    assert!(run(&["extremal", "--n", "3", "--alpha", "0.99"]).status.success());
    let bad = run(&["extremal", "--n", "3", "--alpha", "0.99", "--degree", "3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn chebyshev_cases() {
    let v = json(&["chebyshev", "--n", "3", "--alpha", "0.67"]);
    assert!((num(&v["objective"]) - 0.5).abs() < 1e-9);
    assert!(v["active_set_size"].as_u64().unwrap() >= 3);
    let x = json(&["chebyshev", "--n", "2", "--alpha", "0.5"]);
    assert!((num(&x["objective"]) - 1.0).abs() < 1e-12);
    let c: Vec<f64> = x["poly"]["coeffs"].as_array().unwrap().iter().map(num).collect();
    assert!(c[0].abs() < 1e-15 && (c[1] - 1.0).abs() < 1e-15);
}

#[test]
fn sweep_outputs() {
    let v = json(&["sweep", "--alpha", "0.5", "--n-list", "40,80", "--route", "both"]);
    assert!((num(&v["target"]) - 0.130812).abs() < 1e-6);
    assert!(v["ratio_fit"]["a"].is_number() && v["monic_fit"]["a"].is_number());
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let csv = run(&["sweep", "--alpha", "0.5", "--n-list", "80,40", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,d,ratio,log_ratio_over_n,monic_route_value,ks_distance");
    assert!(lines[1].starts_with("40,20,") && lines[2].starts_with("80,40,"));

    let plot = run(&["sweep", "--alpha", "0.5", "--n-list", "40", "--format", "csv", "--plot-data"]);
    assert!(String::from_utf8(plot.stdout).unwrap().contains("target,0,1.3081203594113697e-1"));

    let cr = json(&["sweep", "--cr", "1", "--n-list", "25,49,100"]);
    for row in cr["rows"].as_array().unwrap() {
        assert!(num(&row["exponent_estimate"]) > 0.0);
    }
    assert_eq!(run(&["sweep", "--alpha", "0.5", "--n-list", ""]).status.code(), Some(2));
}

#[test]
fn verify_suite_selection() {
    let out = run(&["verify", "--suite", "structure"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_failure_exits_one() {
    // The series check cannot reach 1e-12 at alpha 0.9 with 30 terms.
    let out = run(&["verify", "--suite", "identities"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[FAIL]  1"));
}

#[test]
fn output_is_deterministic_and_configurable() {
    let dir = std::env::temp_dir().join(format!("grid-extremal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let out = run(&["extremal", "--n", "20", "--alpha", "0.5", "--emit-poly", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"points_per_gap": 4}"#).unwrap();
    assert!(run(&["--config", cfg.to_str().unwrap(), "extremal", "--n", "10", "--alpha", "0.5"]).status.success());
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "constant", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "ratio_tolerance", "constant", "--alpha", "0.5"]).status.code(), Some(2));
    assert!(run(&["--tol", "ratio_tolerance=0.1", "--workers", "1", "constant", "--alpha", "0.5"]).status.success());
    assert_eq!(run(&["--format", "csv", "constant", "--alpha", "0.5"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
