use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use bell_ising::model::Axis;
use bell_ising::synthesis::{sequence_from_json, sequence_unitary, SynthesisTarget};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bell-ising"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn crate_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn params(name: &str) -> String {
    crate_path(&format!("examples/params/{name}.json")).display().to_string()
}

fn assert_schema(schema: &str, doc: &Value) {
    let text = std::fs::read_to_string(crate_path(&format!("schema/{schema}.schema.json"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn spectrum_json_matches_schema() {
    let out = run(&["spectrum", "--params", &params("isotropic_x")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_schema("spectrum", &doc);
    let mut levels: Vec<f64> = doc["oracle_levels"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    levels.sort_by(f64::total_cmp);
    for (got, want) in levels.iter().zip([-1.0, -1.0, -1.0, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn params_documents_match_schema() {
    for name in ["anisotropic_z", "zz_loop", "isotropic_x", "exchange_z"] {
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(params(name)).unwrap()).unwrap();
        assert_schema("params", &doc);
    }
}

#[test]
fn malformed_params_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"J\": [1, 2, 3],\n \"B1\": }").unwrap();
    let out = run(&["spectrum", "--params", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("bad.json"), "{err}");
}

#[test]
fn missing_key_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"J": [1, 2, 3], "B1": 0.1, "axis": "z"}"#).unwrap();
    let out = run(&["evolve", "--params", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("B2"));
}

#[test]
fn evolve_single_step_is_identity_row() {
    let out = run(&[
        "evolve", "--params", &params("anisotropic_z"), "--t0", "0", "--t1", "0", "--steps", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 1 + 32 + 4);
    assert_eq!(header[0], "t");
    let row: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    for r in 0..4 {
        for c in 0..4 {
            let re = row[1 + 2 * (4 * r + c)];
            let im = row[2 + 2 * (4 * r + c)];
            assert_eq!(re, if r == c { 1.0 } else { 0.0 });
            assert_eq!(im, 0.0);
        }
    }
}

#[test]
fn evolve_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("u.csv");
    let out = run(&[
        "evolve", "--params", &params("anisotropic_z"), "--t1", "1", "--steps", "5", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out_path).unwrap().lines().count(), 6);
}

#[test]
fn entangle_columns() {
    let out = run(&[
        "entangle", "--params", &params("anisotropic_z"), "--state", "bell:-+", "--t1", "5", "--steps", "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,C_closed,C_oracle,S_oracle,C_short");
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 1e-10);
    }
    let rnd = run(&["entangle", "--params", &params("anisotropic_z"), "--state", "random", "--steps", "3"]);
    assert_eq!(String::from_utf8(rnd.stdout).unwrap().lines().next().unwrap(), "t,C_closed,C_oracle,S_oracle");
}

#[test]
fn sector_report() {
    let out = run(&["sector", "--params", &params("anisotropic_z"), "--t", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["sectors"].as_array().unwrap().len(), 2);
    assert_eq!(doc["sectors"][0]["rows"], serde_json::json!([0, 2]));
}

#[test]
fn synthesize_sequence_reproduces_target() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.json");
    let out = run(&[
        "synthesize", "--axis", "z", "--target", "axis=0,1,0;angle=1.234", "--tol", "1e-8", "--out",
        seq.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&seq).unwrap()).unwrap();
    assert_schema("sequence", &doc);
    let pulses = sequence_from_json(&doc).unwrap();
    let target = SynthesisTarget::from_axis_angle([0.0, 1.0, 0.0], 1.234, Axis::Z, 0, 1e-8).unwrap();
    assert!(sequence_unitary(&pulses).dist(&target.embedded()) < 1e-8);
}

#[test]
fn synthesize_rejects_bad_target() {
    let out = run(&["synthesize", "--axis", "z", "--target", "axis=0,1;angle=1"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(diag["error"], "InvalidParams");
}

#[test]
fn loops_exit_codes() {
    let out = run(&["loops", "--params", &params("zz_loop"), "--horizon", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_schema("loops", &doc);
    let t = doc["exact"][0]["t"].as_f64().unwrap();
    assert!((t - std::f64::consts::PI).abs() < 1e-12);

    let out = run(&["loops", "--params", &params("anisotropic_z"), "--horizon", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_schema("loops", &doc);
    assert_eq!(doc["exact_found"], false);
}

#[test]
fn verify_json_is_stable_and_valid() {
    let args = ["verify", "--suite", "group", "--axis", "y", "--samples", "10", "--seed", "5", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = stdout_json(&a);
    assert_schema("verify", &doc);
    assert_eq!(doc["passed"], true);
}

#[test]
fn seed_changes_random_output() {
    let p = params("anisotropic_z");
    let a = run(&["entangle", "--params", &p, "--state", "random", "--steps", "2", "--seed", "1"]);
    let b = run(&["entangle", "--params", &p, "--state", "random", "--steps", "2", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn unsupported_format_is_invalid() {
    let out = run(&["loops", "--params", &params("zz_loop"), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}
