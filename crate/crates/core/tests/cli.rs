//! The command-line contract: exit codes, report shape and determinism.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn problem(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_koszul-division")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, text) = run(args);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

#[test]
fn check_complex_passes_and_flags_non_cycles() {
    for f in ["bidisc.json", "five_generators.json", "constant.json", "top_degree.json"] {
        let (code, rep) = report(&["check-complex", "--input", &problem(f)]);
        assert_eq!(code, 0, "{f}: {rep}");
        assert_eq!(rep["exit_code"], 0);
    }
    let (code, rep) = report(&["check-complex", "--input", &problem("not_cycle.json")]);
    assert_eq!(code, 3);
    assert!(rep["error"].is_string());
}

#[test]
fn report_has_stable_keys() {
    let (_, rep) = report(&["check-complex", "--input", &problem("bidisc.json")]);
    let keys: Vec<&str> = rep.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "error", "exit_code", "inputs_digest", "results", "warnings"]);
    assert_eq!(rep["command"]["name"], "check-complex");
    assert_eq!(rep["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn parse_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("kd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"version": "1", "n": 1, "generators": ["z1 +"], "target": {"": "1"}}"#).unwrap();
    assert_eq!(run(&["check-complex", "--input", bad.to_str().unwrap()]).0, 2);
    std::fs::write(&bad, r#"{"version": "1", "n": 1, "generators": ["z1"], "oops": 1}"#).unwrap();
    assert_eq!(run(&["check-complex", "--input", bad.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["check-complex", "--input", dir.join("missing.json").to_str().unwrap()]).0, 2);
    assert_eq!(run(&["divide", "--input", &problem("disc.json"), "--resolution", "16x16"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exactness_matches_s_norm() {
    let (code, rep) = report(&["exactness", "--input", &problem("fubini_study.json"), "--grid", "3x4"]);
    assert_eq!(code, 0);
    let pts = rep["results"]["points"].as_array().unwrap();
    assert!(!pts.is_empty());
    for p in pts {
        let z = &p["z"][0];
        let abs2 = z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2);
        assert!((p["s_norm2"].as_f64().unwrap() - (1.0 + abs2)).abs() < 1e-12);
        assert_eq!(p["agree"], true);
    }
}

#[test]
fn exactness_flags_zero_locus() {
    let (code, rep) = report(&["exactness", "--input", &problem("bidisc.json"), "--points", &problem("origin.json")]);
    assert_eq!(code, 0);
    let p = &rep["results"]["points"][0];
    assert_eq!(p["E"].as_f64().unwrap(), 0.0);
    assert_eq!(p["zero_locus"], true);
}

#[test]
fn exactness_raw_matrix_is_smallest_eigenvalue() {
    // ΦΦ* = [[5, 2], [2, 2]] has smallest eigenvalue 1.
    let (code, rep) = report(&["exactness", "--input", &problem("raw_matrix.json"), "--grid", "2x4"]);
    assert_eq!(code, 0);
    for p in rep["results"]["points"].as_array().unwrap() {
        assert!((p["e1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(p["surjective"], true);
    }
}

#[test]
fn divide_exit_codes() {
    let (code, rep) = report(&["divide", "--input", &problem("disc.json")]);
    assert_eq!(code, 0);
    let ratio = rep["results"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6 && rep["results"]["satisfied"] == true);

    assert_eq!(run(&["divide", "--input", &problem("top_degree.json")]).0, 0);
    assert_eq!(run(&["divide", "--input", &problem("infeasible.json")]).0, 4);
    assert_eq!(run(&["divide", "--input", &problem("infeasible.json"), "--degree", "9"]).0, 4);
    assert_eq!(run(&["divide", "--input", &problem("divergent.json")]).0, 5);
    assert_eq!(run(&["divide", "--input", &problem("not_cycle.json")]).0, 3);
}

#[test]
fn divide_adjugate_worked_instance() {
    let (code, rep) = report(&["divide", "--input", &problem("adjugate.json"), "--mode", "adjugate"]);
    assert_eq!(code, 0, "{rep}");
    let h: Vec<&str> = rep["results"]["h"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(h, ["z1", "z2"]);
    assert_eq!(rep["results"]["residual_is_zero"], true);
}

#[test]
fn divide_pointwise_rejects_zero_locus() {
    assert_eq!(run(&["divide", "--input", &problem("top_degree.json"), "--mode", "pointwise", "--grid", "2x4"]).0, 0);
    assert_eq!(run(&["divide", "--input", &problem("bidisc.json"), "--mode", "pointwise", "--points", &problem("origin.json")]).0, 6);
}

#[test]
fn verify_identities_pass() {
    for f in ["fubini_study.json", "constant.json", "five_generators.json"] {
        let (code, rep) = report(&["verify-identities", "--input", &problem(f), "--seed", "11"]);
        assert_eq!(code, 0, "{f}: {}", rep["results"]["failed"]);
        assert_eq!(rep["results"]["status"], "PASS");
    }
    let (_, rep) = report(&["verify-identities", "--input", &problem("fubini_study.json")]);
    assert!(rep["results"]["checks"]["hessian"]["max_abs_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn trace_bound_fuzz() {
    let (code, rep) = report(&["trace-bound", "--seed", "9", "--trials", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(rep["results"]["fuzz"]["violations"], 0);
    assert_eq!(rep["results"]["fuzz"]["trials"], 1000);
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["divide", "--input", &problem("top_degree.json")],
        vec!["verify-identities", "--input", &problem("bidisc.json"), "--seed", "2", "--npoints", "5"],
        vec!["trace-bound", "--seed", "1", "--trials", "50"],
    ] {
        assert_eq!(run(&args), run(&args));
    }
}

#[test]
fn seed_changes_report() {
    let a = run(&["trace-bound", "--seed", "1", "--trials", "50"]).1;
    let b = run(&["trace-bound", "--seed", "2", "--trials", "50"]).1;
    assert_ne!(a, b);
}
