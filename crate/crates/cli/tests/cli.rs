use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FANO: &str = "# Fano plane\n7 7\n0 1 2\n0 3 4\n0 5 6\n1 3 5\n1 4 6\n2 3 6\n2 4 5\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperplanar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn generate_writes_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"floors": 2, "corridor_length": 4.0, "connector_columns": [[2.0, 2.0]]}"#);
    let net = path(&dir, "net.json");
    let out = run(&["generate", "--config", &cfg, "--seed", "42", "-o", &net]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let inst: Value = serde_json::from_str(&fs::read_to_string(&net).unwrap()).unwrap();
    assert!(!inst["nodes"].as_array().unwrap().is_empty());
    assert!(!inst["edges"].as_array().unwrap().is_empty());
}

#[test]
fn generate_is_deterministic() {
    let a = run(&["generate", "--seed", "9", "--noise", "0.01"]);
    let b = run(&["generate", "--seed", "9", "--noise", "0.01"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quad_on_coplanar_instance_has_no_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "flat.json", r#"{"floors": 1, "connector_columns": []}"#);
    let net = path(&dir, "net.json");
    assert_eq!(run(&["generate", "--config", &cfg, "-o", &net]).status.code(), Some(0));
    let out = run(&["localize", "--algorithm", "quad", "--input", &net]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_json(&out)["error"], "no-seed");
}

#[test]
fn group_localizes_flagship() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "net.json");
    assert_eq!(run(&["generate", "-o", &net]).status.code(), Some(0));
    let out = run(&["localize", "--algorithm", "group", "--input", &net]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["localized_count"], v["n"]);
    assert!(v["rmse"].as_f64().unwrap() < 1e-6);
    let formation = v["formation"].as_object().unwrap();
    assert!(formation.values().all(|p| p.as_array().is_some_and(|a| a.len() == 3)));
}

#[test]
fn fano_is_reported_not_failed() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "fano.txt", FANO);
    let out = run(&["verify-hardness", "--hypergraph", &h]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["colorable"], false);
    assert_eq!(v["groupable"], false);
    assert_eq!(v["agree"], true);
}

#[test]
fn lifted_single_edge_agrees() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "e.txt", "3 1\n0 1 2\n");
    let out = run(&["verify-hardness", "--hypergraph", &h, "--lift-3d"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["colorable"], true);
    assert_eq!(v["agree"], true);
}

#[test]
fn check_graph_on_a_corridor() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "net.json");
    assert_eq!(run(&["generate", "-o", &net]).status.code(), Some(0));
    let v = stdout_json(&run(&["check-graph", "--input", &net, "--group", "1"]));
    assert!(v["claw"].is_null());
    assert!(v["net"].is_null());
    assert!(v["hamiltonian_path"].as_array().is_some_and(|p| !p.is_empty()));
}

#[test]
fn bench_prints_csv() {
    let out = run(&["bench", "--sizes", "100,200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,algo,n,m,k,r,localized_fraction,rmse,wall_time_ms,error"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn experiment_writes_reports() {
    let dir = TempDir::new().unwrap();
    let out_path = path(&dir, "report.json");
    let out = run(&["experiment", "--scenario", "dense", "--jobs", "2", "-o", &out_path]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out_path)).unwrap()).unwrap();
    let runs = v[0]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r["localized_fraction"] == 1.0));
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(run(&["localize", "--input", "/nonexistent/net.json"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    let out = run(&["experiment", "--scenario", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "invalid-input");
}
