use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn wittkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittkz")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn record<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["records"].as_array().unwrap().iter().find(|r| r["id"] == id).unwrap_or_else(|| panic!("no record {id}"))
}

#[test]
fn os_build_threelines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("os.json");
    let o = wittkz(&["os-build", "--in", "threelines.json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(record(&report, "os.dims")["payload"]["dims"], serde_json::json!([1, 3, 2]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&wittkz(&["kz-cocycle", "--n", "2", "--N", "2", "--m", "symbolic", "--kappa", "symbolic"])), 0);
    assert_eq!(code(&wittkz(&["kz-cocycle", "--n", "2", "--N", "1", "--casimir", "printed"])), 1);
    assert_eq!(code(&wittkz(&["drw-identities", "--p", "4"])), 2);
    assert_eq!(code(&wittkz(&["os-build", "--in", "no-such-arrangement"])), 2);
    assert_eq!(code(&wittkz(&["kz-cocycle", "--casimir", "sideways"])), 2);
}

#[test]
fn drw_identities_default_run() {
    let o = wittkz(&["drw-identities", "--p", "5", "--precision", "3", "--seed", "42", "--samples", "100", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["totals"]["fail"], 0);
    assert!(report["records"].as_array().unwrap().iter().any(|r| r["id"] == "drw.fv"));
}

#[test]
fn reports_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let o = wittkz(&["drw-identities", "--seed", seed, "--samples", "20", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        fs::read(path).unwrap()
    };
    let a = run("a.json", "7");
    assert_eq!(a, run("b.json", "7"));
    assert_ne!(a, run("c.json", "8"));
}

#[test]
fn config_files_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    fs::write(&json, r#"{"n": 2, "N": 1, "m": "symbolic", "kappa": "symbolic"}"#).unwrap();
    let toml = dir.path().join("run.toml");
    fs::write(&toml, "n = 2\nN = 1\nm = \"symbolic\"\nkappa = \"symbolic\"\n").unwrap();
    for cfg in [&json, &toml] {
        let o = wittkz(&["kz-cocycle", "--config", cfg.to_str().unwrap(), "--format", "json"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["config"]["n"], 2);
    }
    // flags win over the file
    let o = wittkz(&["kz-cocycle", "--config", json.to_str().unwrap(), "--casimir", "printed"]);
    assert_eq!(code(&o), 1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(code(&wittkz(&["kz-cocycle", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn arrangement_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.json");
    let o = wittkz(&["os-build", "--in", "threelines", "--format", "json"]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["totals"]["fail"], 0);
    fs::write(&path, r#"{"field": "Q", "dim": 1, "hyperplanes": [{"coeffs": ["1"], "const": "0"}, {"coeffs": ["1"], "const": "-1"}]}"#).unwrap();
    let o = wittkz(&["os-build", "--in", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(record(&report, "os.dims")["payload"]["dims"], serde_json::json!([1, 2]));
    fs::write(&path, r#"{"field": "Q", "dim": 1, "hyperplanes": [{"coeffs": ["1"], "constant": "-1"}]}"#).unwrap();
    assert_eq!(code(&wittkz(&["os-build", "--in", path.to_str().unwrap()])), 2);
}
