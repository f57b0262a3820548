use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kuramoto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kuramoto")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&kuramoto(&all))).unwrap()
}

/// Data rows of a CSV output: comment lines and the header dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn summary_of(stderr: &[u8]) -> Value {
    serde_json::from_slice::<Value>(stderr).unwrap()["result"].clone()
}

#[test]
fn equilibria_table() {
    let text = stdout(&kuramoto(&["equilibria", "--m", "5"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    let cfg: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# config=").unwrap()).unwrap();
    assert_eq!(cfg["command"], "equilibria");
    assert_eq!(cfg["m"], 5);
    assert_eq!(lines.next(), Some("subset,kind,index,potential,eigenvalues"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 16);
    assert!(text.trim_end().ends_with("# summary total=16 non_maximal=16 singular=0 count_by_index=1;5;10"));

    let six = json(&["equilibria", "--m", "6"]);
    assert_eq!(six["schema_version"], 1);
    let rows = six["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.iter().filter(|r| r["kind"] != "singular-max").count(), 22);
    assert_eq!(rows.iter().filter(|r| r["kind"] == "singular-max").count(), 10);
    for r in rows.iter().filter(|r| r["kind"] == "singular-max") {
        assert_eq!(r["potential"], 18.0);
    }
}

#[test]
fn equilibria_rejects_small_m() {
    let out = kuramoto(&["equilibria", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m must be ≥ 2"));
    assert_eq!(kuramoto(&["equilibria", "--m", "nope"]).status.code(), Some(2));
}

#[test]
fn cells_report() {
    let text = stdout(&kuramoto(&["cells", "--m", "5"]));
    let rows = csv_rows(&text);
    let counts: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(counts, ["30", "60", "24"]);
    let betti: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(betti, ["1", "8", "1"]);
    assert!(text.contains("euler_characteristic=-6 boundary_squared_zero=true match=true"));

    let j = json(&["cells", "--m", "6"]);
    assert_eq!(j["result"]["betti_snf"], serde_json::json!([1, 5, 15, 1]));
    assert_eq!(j["result"]["match"], true);
}

#[test]
fn cells_guardrail() {
    let out = kuramoto(&["cells", "--m", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3..=9"));
    assert_eq!(kuramoto(&["cells", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn random_start_reaches_the_sink() {
    let out = kuramoto(&["--seed", "3", "simulate", "--m", "5"]);
    let text = stdout(&out);
    let s = summary_of(&out.stderr);
    assert_eq!(s["terminal"], "sink");
    assert_eq!(s["limit_subset"], "{}");
    let rows = csv_rows(&text);
    assert_eq!(rows[0].len(), 8);
    let v: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(v.last().unwrap().abs() < 1e-6);
}

#[test]
fn generalized_model_runs() {
    let out = kuramoto(&["simulate", "--m", "3", "--omega", "0.01,-0.01,0", "--t-max", "40"]);
    stdout(&out);
    let s = summary_of(&out.stderr);
    // With ω ≠ 0 the standard equilibria are not matched; the run uses its time budget.
    assert_eq!(s["terminal"], "max-time");
    assert_eq!(s["t_end"], 40.0);
    // Small frequencies keep the state close to phase locked.
    let theta: Vec<f64> = s["final_state"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let spread = theta.iter().map(|a| (a - theta[0] + 3.0 * std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI);
    assert!(spread.map(f64::abs).fold(0.0, f64::max) < 0.05);
}

#[test]
fn saddle_connection_trace() {
    let out = kuramoto(&["simulate", "--m", "5", "--start-equilibrium", "1,2", "--heteroclinic-to", "1"]);
    let text = stdout(&out);
    let s = summary_of(&out.stderr);
    assert_eq!(s["terminal"], "saddle");
    assert_eq!(s["limit_subset"], "{1}");
    assert_eq!(s["source_subset"], "{1,2}");
    for b in s["branches"].as_array().unwrap() {
        assert!(b["omega_distance"].as_f64().unwrap() < 1e-4);
        assert!(b["alpha_distance"].as_f64().unwrap() < 1e-3);
    }
    // Oscillators 3, 4, 5 stay together along both branches.
    for r in csv_rows(&text) {
        let t: Vec<f64> = r[2..7].iter().map(|x| x.parse().unwrap()).collect();
        assert!((t[2] - t[3]).abs() < 1e-8 && (t[3] - t[4]).abs() < 1e-8);
    }
}

#[test]
fn unstable_offset_leaves_the_saddle() {
    let out = kuramoto(&["--seed", "1", "simulate", "--m", "5", "--start-equilibrium", "1,2", "--offset-unstable", "1e-5"]);
    let text = stdout(&out);
    let s = summary_of(&out.stderr);
    let start: Vec<f64> = s["start"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let d = |i: usize, c: f64| (start[i] - c).abs();
    assert!(d(0, std::f64::consts::PI) < 1e-5 && d(2, 0.0) < 1e-5);
    // The start stays in the template, so the orbit never leaves it and ends below the source.
    assert!(s["limit_index"].as_u64().unwrap() < 2);
    for r in csv_rows(&text) {
        let t: Vec<f64> = r[3..6].iter().map(|x| x.parse().unwrap()).collect();
        let gap = |a: f64, b: f64| ((a - b + 3.0 * std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI).abs();
        assert!(gap(t[0], t[1]) < 1e-8 && gap(t[1], t[2]) < 1e-8);
    }
    assert_eq!(kuramoto(&["simulate", "--m", "5", "--start-equilibrium", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn integration_failure_exit_code() {
    let out = kuramoto(&["simulate", "--m", "4", "--atol", "1e-300", "--rtol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn winding_number() {
    let text = stdout(&kuramoto(&["imprint", "--m", "5", "--winding", "--I", "3,4,5"]));
    assert_eq!(csv_rows(&text), [["5", "{3,4,5}", "0.001", "64", "1"]]);
    assert_eq!(json(&["imprint", "--m", "5", "--winding", "--I", "1,2,3"])["result"]["winding"], 1);
}

#[test]
fn normal_circle_table() {
    let text = stdout(&kuramoto(&["imprint", "--m", "5", "--base", "roots-of-unity", "--radius", "0.01", "--n", "12"]));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k,phi,crossing_time,alpha_distance,crossing_1,crossing_2,crossing_3,crossing_4,crossing_5,dist_1,dist_2,dist_3,dist_4,dist_5");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap() < 0.02);
        assert!(!r[4].is_empty());
    }
    assert!(text.contains("reached=12/12"));
}

#[test]
fn degenerate_base() {
    let out = kuramoto(&["imprint", "--m", "4", "--base", "singular"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, fmt: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        stdout(&kuramoto(&["--seed", "42", "--format", fmt, "-o", p, "simulate", "--m", "6", "--t-max", "20"]));
        std::fs::read(&path).unwrap()
    };
    // The output path is part of the embedded config, so reruns reuse it.
    assert_eq!(run("a.csv", "csv"), run("a.csv", "csv"));
    assert_eq!(run("a.json", "json"), run("a.json", "json"));
    let first = run("a.csv", "csv");
    let path = dir.path().join("a.csv");
    stdout(&kuramoto(&["--seed", "43", "-o", path.to_str().unwrap(), "simulate", "--m", "6", "--t-max", "20"]));
    assert_ne!(first, std::fs::read(&path).unwrap());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let dumped = stdout(&kuramoto(&["--seed", "7", "--dump-config", "simulate", "--m", "4", "--t-max", "15", "--backward"]));
    std::fs::write(&cfg, &dumped).unwrap();
    let again = stdout(&kuramoto(&["--config", cfg.to_str().unwrap(), "--dump-config", "simulate"]));
    assert_eq!(dumped, again);

    let a = kuramoto(&["--seed", "7", "simulate", "--m", "4", "--t-max", "15", "--backward"]);
    let b = kuramoto(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(summary_of(&a.stderr)["terminal"], "high-potential");
}

#[test]
fn bad_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[cells]\nm = 5\nbogus = 1\n").unwrap();
    assert_eq!(kuramoto(&["--config", cfg.to_str().unwrap(), "cells"]).status.code(), Some(2));
    assert_eq!(kuramoto(&["--config", Path::new("/nonexistent.toml").to_str().unwrap(), "cells"]).status.code(), Some(2));
}

#[test]
fn summary_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    stdout(&kuramoto(&["--seed", "5", "simulate", "--m", "3", "--summary", path.to_str().unwrap()]));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["result"]["terminal"], "sink");
}
