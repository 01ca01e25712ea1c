use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperlab(args: &[&str]) -> Output {
    hyperlab_env(args, None)
}

fn hyperlab_env(args: &[&str], tol: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperlab"));
    cmd.args(args).env_remove("HYPERLAB_TOL");
    if let Some(t) = tol {
        cmd.env("HYPERLAB_TOL", t);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn catalog_lists_every_model() {
    let out = hyperlab(&["--deterministic", "catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "hyperlab/1");
    assert!(v.get("timestamp").is_none());
    assert!(v["data"].as_array().is_some_and(|a| a.len() >= 16));
}

#[test]
fn timestamp_only_without_deterministic() {
    let out = hyperlab(&["lemma", "pointwise", "--c", "4", "--beta", "1"]);
    assert!(json(&out)["timestamp"].as_u64().is_some());
}

#[test]
fn verify_type_b_marks_negative_controls() {
    let out = hyperlab(&[
        "--deterministic",
        "verify",
        "--ambient",
        "CP",
        "--n",
        "3",
        "--family",
        "B",
        "--radius",
        "0.3",
        "--checks",
        "phi-l-commute,hopf",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["checks"].as_array().unwrap();
    let phi_l: Vec<_> = rows
        .iter()
        .filter(|r| r["check"] == "phi-l-commute")
        .collect();
    assert!(!phi_l.is_empty());
    for r in phi_l {
        assert_eq!(r["pass"], false);
        assert_eq!(r["expected"], false);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = hyperlab(&[
        "--deterministic",
        "--out",
        path.to_str().unwrap(),
        "lemma",
        "certificate",
        "--c",
        "4",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["data"]["discriminant"].as_f64(), Some(45312.0));
}

#[test]
fn config_file_supplies_model_and_run_settings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(
        &path,
        "[model]\nambient = CH\nn = 3\nfamily = A2\nradius = 0.8\nk = 1\n[run]\nseed = 11\nchecks = hopf, codazzi\n",
    )
    .unwrap();
    let out = hyperlab(&[
        "--deterministic",
        "--config",
        path.to_str().unwrap(),
        "verify",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let checks: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert!(checks.contains(&"hopf") && checks.contains(&"codazzi"));
    assert!(checks.iter().all(|c| *c == "hopf" || *c == "codazzi"));
}

#[test]
fn jet_from_config_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jet.cfg");
    fs::write(
        &path,
        "[jet]\nalpha = 0.6\nbeta = 0.9\nc = 3.06\nkappa3 = 0.5\nconsistent = true\n",
    )
    .unwrap();
    let out = hyperlab(&[
        "--deterministic",
        "--config",
        path.to_str().unwrap(),
        "lemma",
        "jet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // off the factor branch the differentiated row fails
    let out = hyperlab(&[
        "--deterministic",
        "--config",
        path.to_str().unwrap(),
        "lemma",
        "jet",
        "--c",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn markdown_format() {
    let out = hyperlab(&[
        "--deterministic",
        "--format",
        "markdown",
        "lemma",
        "pointwise",
        "--c",
        "-4",
        "--beta",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# hyperlab report: lemma pointwise"));
    assert!(text.contains("**pass**"));
}

#[test]
fn tolerance_precedence() {
    let args = [
        "--deterministic",
        "random",
        "--dim",
        "5",
        "--samples",
        "20",
        "--property",
        "jacobi",
    ];
    // an absurdly tight tolerance from the environment fails the sweep
    assert_eq!(hyperlab_env(&args, Some("1e-30")).status.code(), Some(1));
    assert_eq!(hyperlab_env(&args, None).status.code(), Some(0));
    // the flag beats the environment
    let mut with_flag = vec!["--tolerance", "1e-9"];
    with_flag.extend_from_slice(&args);
    assert_eq!(
        hyperlab_env(&with_flag, Some("1e-30")).status.code(),
        Some(0)
    );
    // config beats the environment
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tol.cfg");
    fs::write(&path, "[run]\ntolerance = 1e-9\n").unwrap();
    let mut with_cfg = vec!["--config", path.to_str().unwrap()];
    with_cfg.extend_from_slice(&args);
    assert_eq!(
        hyperlab_env(&with_cfg, Some("1e-30")).status.code(),
        Some(0)
    );
    // unparsable or negative tolerances are usage errors
    assert_eq!(hyperlab_env(&args, Some("tight")).status.code(), Some(2));
    let mut neg = vec!["--tolerance", "-1"];
    neg.extend_from_slice(&args);
    assert_eq!(hyperlab(&neg).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["verify", "--ambient", "CP", "--n", "3", "--family", "Z"][..],
        &[
            "verify",
            "--ambient",
            "CP",
            "--n",
            "3",
            "--family",
            "A1",
            "--radius",
            "2",
        ][..],
        &["random", "--dim", "4"][..],
        &[
            "lemma",
            "certificate",
            "--c",
            "0",
            "--alpha",
            "1",
            "--beta",
            "1",
        ][..],
        &["--config", "/nonexistent/hyperlab.cfg", "catalog"][..],
    ] {
        let out = hyperlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(hyperlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn riccati_oracle_regular_start() {
    let out = hyperlab(&[
        "--deterministic",
        "oracle",
        "riccati",
        "--kappa",
        "-1",
        "--r",
        "1.0",
        "--r0",
        "0",
        "--lambda0",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["data"]["value"].as_f64().unwrap();
    assert!((value - 1.0_f64.tanh()).abs() < 1e-9);
}
