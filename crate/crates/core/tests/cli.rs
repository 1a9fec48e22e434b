//! Black-box tests of the command-line interface and its exit codes:
//! 0 = all expectations met, 1 = a check failed, 2 = bad input.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lndcert"))
}

fn scenario_path() -> String {
    format!("{}/scenarios/model_d2.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bundled_scenario_exits_zero() {
    let out = bin().args(["run", &scenario_path()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "ALL_VERIFIED");
    assert_eq!(report["version"], "1");
    assert!(report["convention"]
        .as_str()
        .unwrap()
        .starts_with("pullback-compose"));
}

#[test]
fn text_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = bin()
        .args(["run", &scenario_path(), "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&out_path).unwrap();
    let report: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(report["status"], "ALL_VERIFIED");

    let text = bin()
        .args(["run", &scenario_path(), "--format", "text"])
        .output()
        .unwrap();
    assert_eq!(text.status.code(), Some(0));
    let rendered = String::from_utf8(text.stdout).unwrap();
    assert!(rendered.contains("status: ALL_VERIFIED"));
    assert!(rendered.contains("[PASS]"));
}

#[test]
fn failed_expectation_exits_one() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(
        f,
        r#"{{
            "nvars": 2, "trunc_cap": 4,
            "derivations": {{ "dx": "[1, 0]", "dy": "[0, 1]" }},
            "tasks": [
                {{ "op": "equivalent",
                   "args": {{ "d1": "dx", "d2": "dy" }},
                   "expect": "EQUIVALENT" }}
            ]
        }}"#
    )
    .unwrap();
    let out = bin().arg("run").arg(f.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "FAILURES");
}

#[test]
fn malformed_input_exits_two() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{{ not json").unwrap();
    let out = bin().arg("run").arg(f.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(out.stdout.is_empty(), "no report on schema errors");

    let missing = bin().args(["run", "/nonexistent.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn certify_subcommand() {
    let out = bin()
        .args(["certify", "--d", "2", "--budget", "5", "--cap", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("NON_ALGEBRAIC certificate verified"));

    // cap too small for the requested budget: usage error
    let bad = bin()
        .args(["certify", "--d", "3", "--budget", "5", "--cap", "8"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn lift_subcommand() {
    let out = bin()
        .args(["lift", "--derivation", "[1, x1]", "--g0", "x2", "--cap", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "-1/2*x1^2 + x2");
}

#[test]
fn check_subcommand() {
    let out = bin()
        .args(["check", "--poly", "(x1 + x2)^2 - x1^2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("canonical: 2*x1*x2 + x2^2"), "{text}");
    assert!(text.contains("ord: 2"));

    let bad = bin().args(["check", "--poly", "x1 + + x2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
