use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use morseforge::morse::build_f;
use morseforge::poly::{FloatPoly, MultiPoly};
use morseforge::synth::AuditBundle;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_morseforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("MORSEFORGE_SEED").output().expect("binary runs")
}

fn write_points(dir: &TempDir, name: &str, dimension: usize, points: &[&[&str]]) -> PathBuf {
    let path = dir.path().join(name);
    let doc = serde_json::json!({ "dimension": dimension, "points": points });
    fs::write(&path, doc.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synthesize(dir: &TempDir, points: &Path) -> PathBuf {
    let out = dir.path().join("bundle.json");
    let o = run(&["synthesize", "-i", s(points), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn two_point_bundle(dir: &TempDir) -> PathBuf {
    let pts = write_points(dir, "pts.json", 2, &[&["-1", "0"], &["1", "0"]]);
    synthesize(dir, &pts)
}

#[test]
fn synthesize_then_verify_passes() {
    let dir = TempDir::new().unwrap();
    let pts = write_points(&dir, "pts.json", 2, &[&["0", "0"], &["1/2", "3"]]);
    let bundle = synthesize(&dir, &pts);
    let b: AuditBundle = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    assert_eq!(b.per_point.len(), 2);
    for a in &b.per_point {
        assert!(a.minors.iter().all(|m| m > &num_traits::Zero::zero()));
    }
    let report = dir.path().join("report.json");
    let o = run(&["verify", "-i", s(&bundle), "-o", s(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["overall_pass"], true);
    assert_eq!(r["pass"], true);
}

#[test]
fn round_trips_for_fixture_sets() {
    let dir = TempDir::new().unwrap();
    let sets: Vec<(usize, Vec<Vec<&str>>)> = vec![
        (2, vec![vec!["0", "0"]]),
        (3, vec![vec!["0", "0", "0"], vec!["1", "-1", "2"]]),
        (2, vec![vec!["0", "0"], vec!["0", "1"], vec!["1", "1"]]),
        (4, vec![vec!["0", "0", "0", "0"], vec!["1", "0", "0", "0"], vec!["0", "1", "0", "0"], vec!["0", "0", "1", "1"]]),
    ];
    for (i, (n, pts)) in sets.iter().enumerate() {
        let refs: Vec<&[&str]> = pts.iter().map(|p| p.as_slice()).collect();
        let path = write_points(&dir, &format!("p{i}.json"), *n, &refs);
        let bundle = synthesize(&dir, &path);
        let report = dir.path().join(format!("r{i}.json"));
        let o = run(&["verify", "-i", s(&bundle), "-o", s(&report), "--seeds-per-axis", "4"]);
        assert_eq!(o.status.code(), Some(0), "set {i}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn bundle_text_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    let text = fs::read_to_string(&bundle).unwrap();
    let b: AuditBundle = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&b).unwrap(), text);
}

#[test]
fn origin_gives_f_with_alpha_x() {
    let dir = TempDir::new().unwrap();
    let pts = write_points(&dir, "o.json", 2, &[&["0", "0"]]);
    let bundle = synthesize(&dir, &pts);
    let b: AuditBundle = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    let alpha = MultiPoly::var(1, 0).unwrap();
    assert_eq!(b.result.p_poly, build_f(&alpha).unwrap().f);
}

#[test]
fn hypothesis_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.json");
    let one_d = write_points(&dir, "one.json", 1, &[&["0"]]);
    let o = run(&["synthesize", "-i", s(&one_d), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));

    let dup = write_points(&dir, "dup.json", 2, &[&["1", "2"], &["2/2", "4/2"]]);
    assert_eq!(run(&["synthesize", "-i", s(&dup), "-o", s(&out)]).status.code(), Some(3));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"dimension\": 2, \"points\": [[\"1/0\", \"0\"]]}").unwrap();
    assert_eq!(run(&["synthesize", "-i", s(&bad), "-o", s(&out)]).status.code(), Some(2));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["synthesize", "-i", s(&bad), "-o", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["verify", "-i", s(&bad), "-o", s(&out)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["synthesize", "-i", s(&missing), "-o", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["flow", "-i", s(&missing), "--start", "0,0", "--dt", "-1"]).status.code(), Some(2));
    assert!(!out.exists());
}

fn tamper(bundle: &Path, edit: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(bundle).unwrap()).unwrap();
    edit(&mut v);
    fs::write(bundle, v.to_string()).unwrap();
}

#[test]
fn tampered_polynomial_fails_verification() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    let mut b: AuditBundle = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    b.result.p_poly = b.result.p_poly.try_add(&MultiPoly::var(2, 0).unwrap()).unwrap();
    fs::write(&bundle, serde_json::to_string(&b).unwrap()).unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["verify", "-i", s(&bundle), "-o", s(&report), "--seeds-per-axis", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["per_point"][0]["gradient_zero"], false);
    assert_ne!(r["per_point"][0]["gradient_residual"][0], "0");
}

#[test]
fn flipped_minor_fails_verification() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    tamper(&bundle, |v| {
        let m = &mut v["per_point"][0]["minors"][0];
        let flipped = format!("-{}", m.as_str().unwrap());
        *m = Value::String(flipped);
    });
    let report = dir.path().join("r.json");
    let o = run(&["verify", "-i", s(&bundle), "-o", s(&report), "--seeds-per-axis", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["overall_pass"], true);
    assert_eq!(r["integrity"]["audits_match"], false);
}

#[test]
fn box_override_and_seed_are_recorded() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    let report = dir.path().join("r.json");
    let o = bin()
        .args(["verify", "-i", s(&bundle), "-o", s(&report), "--box", "-2,2", "--box", "-1,1"])
        .args(["--seeds-per-axis", "5", "--basin-seeds", "3", "--dt", "1e-4", "--t-max", "20"])
        .env("MORSEFORGE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["spurious_search"]["bounds"]["lower"], serde_json::json!([-2.0, -1.0]));
    assert_eq!(r["spurious_search"]["seeds_used"], 25);
    assert_eq!(r["basin"]["seed"], 42);
    assert_eq!(r["basin"]["num_seeds"], 3);

    let o = run(&["verify", "-i", s(&bundle), "-o", s(&report), "--box", "-2,2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "-i", s(&bundle), "-o", s(&report), "--residual-tol", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flow_from_a_minimum_and_a_generic_start() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    let o = run(&["flow", "-i", s(&bundle), "--start", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let t: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["steps"], 0);
    assert_eq!(t["classified"], serde_json::json!({"kind": "converged_to", "index": 1}));

    let trace = dir.path().join("t.json");
    let o = run(&["flow", "-i", s(&bundle), "--start", "-0.7,0.2", "--dt", "1e-4", "-o", s(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let t: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["classified"]["index"], 0);

    assert_eq!(run(&["flow", "-i", s(&bundle), "--start", "1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["flow", "-i", s(&bundle), "--start", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["flow", "-i", s(&bundle), "--start", "1000,0"]).status.code(), Some(3));
}

#[test]
fn saddle_field_flows() {
    let dir = TempDir::new().unwrap();
    let pts = write_points(&dir, "pts.json", 2, &[&["-1", "0"], &["1", "0"]]);
    let field = dir.path().join("field.json");
    let o = run(&["saddle-field", "-i", s(&pts), "-o", s(&field)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&field).unwrap()).unwrap();
    assert_eq!(v["kind"], "saddle-field");
    assert_eq!(v["saddle_set"], serde_json::json!(["0"]));

    let o = run(&["flow", "-i", s(&field), "--start", "0.1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let t: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t["classified"]["index"], 1);

    // x₁ = 0 is invariant: the flow runs into the saddle, not into X
    let o = run(&["flow", "-i", s(&field), "--start", "0,0.5", "--t-max", "30", "-o", s(&dir.path().join("t.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let summary = String::from_utf8_lossy(&o.stdout);
    assert!(summary.contains("max_time_reached") && summary.contains("saddle 0"), "{summary}");
}

#[test]
fn export_grid_rows_and_labels() {
    let dir = TempDir::new().unwrap();
    let bundle = two_point_bundle(&dir);
    let csv = dir.path().join("g.csv");
    let o = run(&["export-grid", "-i", s(&bundle), "--resolution", "8", "-o", s(&csv), "--dt", "1e-4", "--t-max", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 65);
    assert_eq!(lines[0], "x,y,P,basin_label");
    let b: AuditBundle = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    let p = FloatPoly::new(&b.result.p_poly);
    let mut labels = std::collections::BTreeSet::new();
    for row in &lines[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let x: f64 = f[0].parse().unwrap();
        let y: f64 = f[1].parse().unwrap();
        let pv: f64 = f[2].parse().unwrap();
        assert_eq!(pv, p.eval(&[x, y]).unwrap());
        assert_eq!(pv, b.result.p_poly.eval_float(&[x, y]).unwrap());
        labels.insert(f[3].parse::<i64>().unwrap());
    }
    assert!(labels.iter().all(|l| (-1..=1).contains(l)));
    assert!(labels.contains(&0) && labels.contains(&1));

    assert_eq!(run(&["export-grid", "-i", s(&bundle), "--resolution", "4", "-o", s(&csv)]).status.code(), Some(2));
    let pts = write_points(&dir, "p3.json", 3, &[&["0", "0", "0"]]);
    let b3 = synthesize(&dir, &pts);
    assert_eq!(run(&["export-grid", "-i", s(&b3), "--resolution", "8", "-o", s(&csv)]).status.code(), Some(4));
}
