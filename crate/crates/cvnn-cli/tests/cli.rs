use std::path::Path;
use std::process::{Command, Output};

use cvnn_cli::{parse_config, run_cli_with, EXIT_OK, EXIT_REFUSED, EXIT_USAGE};
use serde_json::Value;

fn cvnn(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cvnn"));
    cmd.args(args).env_remove("CVNN_SEED");
    if let Some(s) = seed_env {
        cmd.env("CVNN_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<&str> = std::iter::once("cvnn").chain(args.iter().copied()).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn classify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cvnn(&["classify", "--activation", "ratio", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let report = read_json(&path);
    assert_eq!(report["shallow_universal"], "yes");
    assert_eq!(report["deep_universal"], "yes");
    assert_eq!(report["run_config"]["activation"], "ratio");
    assert_eq!(report["run_config"]["library_version"], cvnn::VERSION);
}

#[test]
fn approximate_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let net = dir.path().join("net.json");
    let out = cvnn(
        &[
            "approximate", "--activation", "ratio", "--target", "cone", "--degree", "6", "--radius", "1",
            "--out", path.to_str().unwrap(), "--network-out", net.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = read_json(&path);
    assert!(cert["sup_error"].as_f64().unwrap() <= 0.1);
    assert_eq!(cert["run_config"]["degree"], 6);
    let network = cvnn::Network::from_json(&std::fs::read_to_string(&net).unwrap()).unwrap();
    assert_eq!(network.hidden_layers(), 1);
}

#[test]
fn unknown_names_are_usage_errors() {
    let (code, _, err) = in_process(&["classify", "--activation", "nosuch"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("ratio") && err.contains("example_4_8"), "{err}");
    let (code, _, err) = in_process(&["approximate", "--activation", "ratio", "--target", "nosuch"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cone"), "{err}");
    assert_eq!(in_process(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["classify"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["floor", "--activation", "ratio", "--target", "cone", "--widths", "a,b"]).0, EXIT_USAGE);
}

#[test]
fn refused_synthesis_exits_one() {
    let (code, _, err) = in_process(&["approximate", "--activation", "example_4_8", "--target", "cone", "--degree", "2"]);
    assert_eq!(code, EXIT_REFUSED);
    assert!(!err.is_empty());
}

#[test]
fn invariants_report_and_verdict() {
    let (code, out, _) = in_process(&["invariants", "--activation", "sin", "--layers", "2", "--invariant", "dbar_vanishes", "--trials", "5"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-5);
    let (code, _, _) =
        in_process(&["invariants", "--activation", "abs2", "--layers", "1", "--invariant", "laplacian_power_vanishes(1)", "--trials", "3"]);
    assert_eq!(code, EXIT_REFUSED);
}

#[test]
fn floor_csv_output() {
    let (code, out, _) = in_process(&["floor", "--activation", "ratio", "--target", "cone", "--widths", "20,40", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "width,sup_error,l1_error");
    assert!(lines[1].starts_with("20,") && lines[2].starts_with("40,"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# floor run\nactivation = ratio\ntarget = cone\nwidths = 10,20\nseed = 5\n").unwrap();
    let base = ["floor", "--config", cfg.to_str().unwrap()];
    let (code, out, _) = in_process(&base);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let mut flagged = base.to_vec();
    flagged.extend(["--seed", "9", "--widths", "15"]);
    let v: Value = serde_json::from_str(&in_process(&flagged).1).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["run_config"]["widths"], serde_json::json!([15]));

    std::fs::write(&cfg, "activation = ratio\nbogus = 1\n").unwrap();
    assert_eq!(in_process(&base).0, EXIT_USAGE);
}

#[test]
fn seed_environment_fallback() {
    let args = ["floor", "--activation", "ratio", "--target", "cone", "--widths", "10"];
    let from_env: Value = serde_json::from_slice(&cvnn(&args, Some("17")).stdout).unwrap();
    assert_eq!(from_env["seed"], 17);
    let default: Value = serde_json::from_slice(&cvnn(&args, None).stdout).unwrap();
    assert_eq!(default["seed"], 0);
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "3"]);
    let flag_wins: Value = serde_json::from_slice(&cvnn(&flagged, Some("17")).stdout).unwrap();
    assert_eq!(flag_wins["seed"], 3);
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["classify", "--activation", "sin"],
        vec!["floor", "--activation", "sin", "--target", "cone", "--widths", "10,20"],
        vec!["invariants", "--activation", "tanh", "--layers", "2", "--trials", "3"],
    ] {
        let a = cvnn(&args, None);
        let b = cvnn(&args, None);
        assert_eq!(a.status.code(), Some(EXIT_OK));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn config_parser() {
    let map = parse_config("a = 1\n  # comment\nb=two # trailing\n\n").unwrap();
    assert_eq!(map.get("a").map(String::as_str), Some("1"));
    assert_eq!(map.get("b").map(String::as_str), Some("two"));
    assert!(parse_config("no equals sign").is_err());
}
