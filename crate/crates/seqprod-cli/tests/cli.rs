//! End-to-end checks of the `seqprod` binary: exit codes, determinism,
//! counterexample output and certification of files on disk.

use std::process::Command;

use seqprod::json::ProcessJson;
use seqprod::{Algebra, BlockLinearMap, CMatrix, Complex64};

fn seqprod() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seqprod"));
    cmd.env_remove("SEQPROD_SEED");
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let output = cmd.output().expect("binary runs");
    (
        output.status.code().expect("binary is not killed by a signal"),
        String::from_utf8(output.stdout).expect("stdout is utf-8"),
        String::from_utf8(output.stderr).expect("stderr is utf-8"),
    )
}

#[test]
fn verify_effects_on_a_single_block_passes() {
    let (code, stdout, _) = run(seqprod().args(["verify", "effects", "--dims", "3", "--samples", "4"]));
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("effects/sequential-product-fixes-units"));
    assert!(stdout.contains("5 properties, 5 passed"));
}

#[test]
fn verify_reports_are_byte_identical_for_a_seed() {
    let args = ["verify", "linalg", "--seed", "7", "--samples", "3", "--dims", "2;2,2", "--json"];
    let (code_a, first, _) = run(seqprod().args(args));
    let (code_b, second, _) = run(seqprod().args(args));
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(first, second);

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let (code_c, third, _) = run(seqprod().args(args).arg("--out").arg(&path));
    assert_eq!(code_c, 0);
    assert_eq!(third, first, "--out must not change stdout bytes");
    let written = std::fs::read_to_string(&path).expect("report file");
    assert_eq!(written, first);
}

#[test]
fn env_seed_matches_the_flag_and_rejects_garbage() {
    let (_, with_flag, _) =
        run(seqprod().args(["verify", "linalg", "--seed", "7", "--samples", "3", "--json"]));
    let (code, with_env, _) = run(seqprod()
        .args(["verify", "linalg", "--samples", "3", "--json"])
        .env("SEQPROD_SEED", "7"));
    assert_eq!(code, 0);
    assert_eq!(with_env, with_flag);

    let (code, _, stderr) = run(seqprod()
        .args(["verify", "linalg", "--samples", "3"])
        .env("SEQPROD_SEED", "pony"));
    assert_eq!(code, 2);
    assert!(stderr.contains("SEQPROD_SEED"));
}

#[test]
fn tolerance_override_can_force_a_failure_exit() {
    let (code, stdout, _) =
        run(seqprod().args(["verify", "linalg", "--samples", "3", "--tol", "residual=1e-30"]));
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "nope"][..],
        &["counterexample", "ax9-none"][..],
        &["verify", "linalg", "--dims", "2;x"][..],
        &["verify", "linalg", "--dims", "9"][..],
        &["verify", "linalg", "--samples", "0"][..],
        &["verify", "linalg", "--tol", "residual"][..],
        &["verify", "linalg", "--tol", "mystery=1e-9"][..],
    ] {
        let (code, _, stderr) = run(seqprod().args(args));
        assert_eq!(code, 2, "args {args:?} should be a usage error, stderr: {stderr}");
        assert!(!stderr.is_empty(), "args {args:?} should explain the error");
    }
}

#[test]
fn counterexamples_reproduce_and_print_frozen_gaps() {
    // Gaps are recomputed live, so pin prefixes rather than final ulps.
    let cases = [
        ("ax1-pqp", vec!["0.1875", "0.0753078929535144"]),
        ("ax2-sign", vec!["0.94280904158206"]),
        ("ax4-phase", vec!["0.47644028331006"]),
    ];
    for (name, needles) in cases {
        let (code, stdout, _) = run(seqprod().args(["counterexample", name]));
        assert_eq!(code, 0, "{name} stdout: {stdout}");
        for needle in needles {
            assert!(stdout.contains(needle), "{name} should print {needle}:\n{stdout}");
        }
        assert!(stdout.contains("pattern and frozen values reproduced"));

        let (code, json, _) = run(seqprod().args(["counterexample", name, "--json"]));
        assert_eq!(code, 0);
        let value: serde_json::Value = serde_json::from_str(&json).expect("valid JSON");
        assert_eq!(value["fixture_matches"], serde_json::Value::Bool(true));
        assert_eq!(value["schema"], serde_json::json!(1));
    }
}

#[test]
fn certify_identity_reports_every_flag_true() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("identity.json");
    std::fs::write(
        &path,
        r#"{
            "source": [2],
            "target": [2],
            "kraus": { "0->0": [ { "dim": 2, "entries": [[1,0],[0,0],[0,0],[1,0]] } ] }
        }"#,
    )
    .expect("write map file");

    let (code, stdout, _) = run(seqprod().arg("certify").arg(&path));
    assert_eq!(code, 0, "stdout: {stdout}");
    for flag in ["positive", "2-positive", "completely-positive", "unital", "contractive"] {
        let line = stdout.lines().find(|l| l.starts_with(flag)).expect("flag line");
        assert!(line.ends_with("true"), "{flag} should be true: {line}");
    }
}

#[test]
fn certify_transpose_superop_is_not_completely_positive() {
    let algebra = Algebra::full(2).expect("valid shape");
    let transpose = BlockLinearMap::from_action(algebra.clone(), algebra, |_, u| {
        Ok(vec![u.transpose()])
    })
    .expect("transpose is linear");
    let json = serde_json::to_string(&ProcessJson::from_linear(&transpose)).expect("json");

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("transpose.json");
    std::fs::write(&path, json).expect("write map file");

    let (code, stdout, _) = run(seqprod().arg("certify").arg(&path).arg("--json"));
    assert_eq!(code, 0, "stdout: {stdout}");
    let record: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(record["form"], serde_json::json!("superop"));
    assert_eq!(record["positive"], serde_json::Value::Bool(true));
    assert_eq!(record["completely-positive"], serde_json::Value::Bool(false));
    assert_eq!(record["unital"], serde_json::Value::Bool(true));
}

#[test]
fn certify_compression_is_contractive_but_not_unital() {
    let root = CMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.5f64.sqrt(), 0.0)
        }
    });
    let kraus = serde_json::to_string(&seqprod::json::MatrixJson::from_matrix(&root)).expect("json");
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("compression.json");
    std::fs::write(
        &path,
        format!(r#"{{ "source": [2], "target": [2], "kraus": {{ "0->0": [ {kraus} ] }} }}"#),
    )
    .expect("write map file");

    let (code, stdout, _) = run(seqprod().arg("certify").arg(&path).arg("--json"));
    assert_eq!(code, 0, "stdout: {stdout}");
    let record: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(record["contractive"], serde_json::Value::Bool(true));
    assert_eq!(record["unital"], serde_json::Value::Bool(false));
    assert_eq!(record["completely-positive"], serde_json::Value::Bool(true));
}

#[test]
fn certify_rejects_missing_and_malformed_files() {
    let (code, _, stderr) = run(seqprod().args(["certify", "/nonexistent/map.json"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot read"));

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").expect("write file");
    let (code, _, stderr) = run(seqprod().arg("certify").arg(&path));
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot parse"));
}

#[test]
fn verify_axioms_lists_every_candidate_pattern() {
    let (code, stdout, _) =
        run(seqprod().args(["verify", "axioms", "--samples", "4", "--json"]));
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    let properties = report["properties"].as_array().expect("properties array");
    assert_eq!(properties.len(), 5);
    for p in properties {
        assert_eq!(p["status"], serde_json::json!("pass"), "property {p}");
    }
}
