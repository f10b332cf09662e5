use std::process::{Command, Output};

fn cvcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvcat")).args(args).output().expect("run cvcat")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&cvcat(&["gate", "--bogus"])), 64);
    assert_eq!(code(&cvcat(&["frobnicate"])), 64);
    assert_eq!(code(&cvcat(&["--help"])), 0);
}

#[test]
fn domain_errors_exit_1() {
    let out = cvcat(&["gate", "--db", "-3"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
    assert_eq!(code(&cvcat(&["state", "--points", "8"])), 1);
    assert_eq!(code(&cvcat(&["sweep-infidelity", "--db-range", "0:x"])), 1);
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_cvcat"))
        .args(["support-region"])
        .env("CVCAT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn dumped_config_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let out = cvcat(&[
        "gate", "--gamma", "0.2", "--ym", "6", "--db", "9", "--points", "512",
        "--dump-config", config.to_str().unwrap(), "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = cvcat(&["gate", "--config", config.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read(&first).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&second).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"gamma": 0.2, "points": 256, "format": "json"}"#).unwrap();
    let out = cvcat(&["gate", "--config", config.to_str().unwrap(), "--gamma", "0.3"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["gamma"], 0.3);
    assert_eq!(doc["config"]["points"], 256);
    std::fs::write(&config, r#"{"gama": 0.2}"#).unwrap();
    assert_eq!(code(&cvcat(&["gate", "--config", config.to_str().unwrap()])), 1);
}

#[test]
fn wigner_of_high_fidelity_output_is_negative() {
    let out = cvcat(&["wigner", "--gamma", "0.5", "--ym", "15", "--db", "14", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let data = &doc["data"];
    assert!((data["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!(data["log_negativity"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_csv_layout() {
    let out = cvcat(&["sweep-probability", "--variable", "ym", "--ym-range", "-5:5", "--samples", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "variable_value,infidelity,probability_density,wln,efficiency,error");
    assert_eq!(lines.count(), 5);
}

#[test]
fn support_region_is_closed_polygon() {
    let out = cvcat(&["support-region", "--gamma", "0.1", "--n-boundary", "64"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() >= 64);
    assert_eq!(rows.first(), rows.last());
}
