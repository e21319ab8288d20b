use std::process::{Command, Output};

use serde_json::Value;

fn bicolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicolor")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn sectors_l2_has_sixteen_components() {
    let v = json_of(&bicolor(&["sectors", "--model", "square-total", "--L", "2", "--moves", "B,C"]));
    assert_eq!(v["result"]["num_components"], 16);
    assert_eq!(v["result"]["distinct_labels"], 16);
    assert_eq!(v["config"]["command"]["moves"], "B,C");
    assert!(v["geometry_hash"].as_str().unwrap().len() == 16);
    assert!(v["wall_time_s"].is_number());
}

#[test]
fn count_ni_csv_row() {
    let out = bicolor(&["count", "--family", "Ni", "--l", "1..6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seed "));
    let row = text.lines().find(|l| l.starts_with("Ni,2,")).expect("l=2 row");
    assert_eq!(row.split(',').nth(3), Some("21"));
    assert_eq!(text.lines().filter(|l| l.starts_with("Ni,")).count(), 6);
}

#[test]
fn spectrum_ground_space() {
    let v = json_of(&bicolor(&["spectrum", "--model", "square-total", "--L", "2", "--k", "20"]));
    let e = v["result"]["ground_energy"].as_f64().unwrap();
    assert!((e + 40.0).abs() < 1e-9);
    assert_eq!(v["result"]["ground_degeneracy"], 16);
    assert!(v["result"]["max_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn reruns_are_bit_exact_without_timing() {
    let args = ["entropy", "--model", "square-total", "--L", "2", "--omit-timing"];
    let a = bicolor(&args);
    let b = bicolor(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nn.csv");
    let out = bicolor(&["count", "--family", "Nn", "--l", "1..3", "--omit-timing", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let strip = |text: String| text.lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>().join("\n");
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = String::from_utf8(bicolor(&["count", "--family", "Nn", "--l", "1..3", "--omit-timing"]).stdout).unwrap();
    assert!(written.contains("nn.csv"));
    assert_eq!(strip(written), strip(direct));
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(bicolor(&["count", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(bicolor(&["count", "--family", "Ni", "--l", "5..2"]).status.code(), Some(2));
    assert_eq!(bicolor(&["spectrum", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(bicolor(&["spectrum", "--L", "3", "--max-basis", "1000"]).status.code(), Some(3));
    assert_eq!(bicolor(&["sectors", "--L", "3", "--max-basis", "10"]).status.code(), Some(3));
}

#[test]
fn fit_recovers_half_for_fpl() {
    let v = json_of(&bicolor(&["fit", "--family", "SFPL"]));
    assert!((v["result"]["fit"]["beta"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn wilson_reports_every_relation() {
    let v = json_of(&bicolor(&["wilson", "--L", "2"]));
    let rel = v["result"]["relations"].as_array().unwrap();
    assert_eq!(rel.len(), 24);
    assert!(rel.iter().filter(|r| r["index"] == 0).all(|r| r["holds"] == true));
}

#[test]
fn towers_defect_pair() {
    let v = json_of(&bicolor(&["towers", "--L", "2", "--defects", "0,1", "--no-scan"]));
    let states = v["result"]["defect_states"]["states"].as_array().unwrap();
    assert!(!states.is_empty());
    assert!(states.iter().all(|s| s["residual"].is_number()));
}

#[test]
fn hex_geometry_and_threads_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_bicolor"))
        .args(["geometry", "--model", "hex", "--lx", "2", "--ly", "2"])
        .env("BICOLOR_THREADS", "2")
        .output()
        .unwrap();
    let v = json_of(&out);
    assert_eq!(v["result"]["num_edges"], 12);
    assert_eq!(v["result"]["num_vertices"], 8);
}
