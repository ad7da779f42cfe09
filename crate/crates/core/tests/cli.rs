use std::process::{Command, Output};

use serde_json::Value;

fn data(path: &str) -> String {
    format!("{}/data/{path}", env!("CARGO_MANIFEST_DIR"))
}

fn ompkit(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ompkit"));
    cmd.args(args).env_remove("OMPKIT_SEED");
    if let Some(s) = seed_env {
        cmd.env("OMPKIT_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = ompkit(args, None);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn tmp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("ompkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_reports() {
    let (code, r) = run(&["solve", &data("bb84.json")]);
    assert_eq!(code, 0);
    assert!((r["result"]["p_guess"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert_eq!(r["command"], "solve");
    assert_eq!(r["tool"], "ompkit");
    assert!(r["tolerances"]["match_tol"].is_number());
    assert!(r["timestamp_unix"].is_number());
    assert_eq!(r["result"]["identified"], serde_json::json!([1, 2, 3, 4]));

    let (code, r) = run(&["solve", &data("orthogonal-pair.json")]);
    assert_eq!(code, 0);
    assert!((r["result"]["p_guess"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let (_, r) = run(&["solve", &data("unequal-3.json")]);
    let s1: Vec<f64> = serde_json::from_value(r["result"]["comp_states"][0].clone()).unwrap();
    for (a, b) in s1.iter().zip([-0.796, 0.385, -0.466]) {
        assert!((a - b).abs() < 1e-3);
    }
}

#[test]
fn solve_with_measurement() {
    let (code, r) = run(&["solve", &data("bb84.json"), "--measurement", "1,2", "--no-timestamp"]);
    assert_eq!(code, 0);
    let m = &r["result"]["measurement"];
    assert_eq!(m["index_set"], serde_json::json!([1, 2]));
    assert!((m["success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!(r.get("timestamp_unix").is_none());
}

#[test]
fn check_verdicts_and_exit_codes() {
    let (code, r) = run(&["check", &data("bb84.json"), &data("channels/depolarizing-0.2.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["is_omp"], true);
    assert!((r["result"]["delta"].as_f64().unwrap() - 0.05).abs() < 1e-8);
    assert!((r["result"]["equiprobable"]["kappa"].as_f64().unwrap() - 0.8).abs() < 1e-8);

    let (code, r) = run(&["check", &data("bb84.json"), &data("channels/z-rotation.json"), "--weak", "1,2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["mode"], "WEAK");
    assert!(r["result"]["delta"].as_f64().unwrap().abs() < 1e-8);

    let (code, r) = run(&["check", &data("bb84.json"), &data("channels/z-rotation.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["is_omp"], false);

    let (code, r) = run(&["check", &data("one-basis.json"), &data("channels/z-rotation.json")]);
    assert_eq!(code, 0);
    assert!(r["result"]["two_state"]["lambda"].is_number());

    let out = ompkit(&["check", &data("orthogonal-pair.json"), &data("channels/bit-flip-reflection.json")], None);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not completely positive"));
}

#[test]
fn input_errors_exit_2() {
    let unknown = tmp("unknown.json", r#"{"states": [{"q": 1, "bloch": [0,0,1], "label": "a"}]}"#);
    let priors = tmp("priors.json", r#"{"states": [{"q": 0.7, "bloch": [0,0,1]}, {"q": 0.7, "bloch": [0,0,-1]}]}"#);
    let outside = tmp("outside.json", r#"{"states": [{"q": 0.5, "bloch": [0,0,1.5]}, {"q": 0.5, "bloch": [0,0,-1]}]}"#);
    for args in [
        vec!["solve", unknown.as_str()],
        vec!["solve", priors.as_str()],
        vec!["solve", outside.as_str()],
        vec!["solve", "/nonexistent/file.json"],
        vec!["solve", &data("bb84.json"), "--measurement", "0,2"],
        vec!["solve", &data("bb84.json"), "--tol", "-1"],
        vec!["check", &data("bb84.json"), &data("bb84.json")],
        vec!["family", &data("bb84.json"), "--samples", "0"],
        vec!["frobnicate"],
    ] {
        let out = ompkit(&args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn family_report() {
    let (code, r) = run(&["family", &data("bb84.json"), "--samples", "200"]);
    assert_eq!(code, 0);
    let res = &r["result"];
    assert_eq!(res["nullity"], 7);
    assert_eq!(res["Q"].as_array().unwrap().len(), 9);
    assert_eq!(res["null_basis"].as_array().unwrap().len(), 7);
    assert_eq!(res["sieve"]["samples"], 200);

    // δ = 5 is on the affine slice but far beyond min r, so nothing survives.
    let (code, r) = run(&["family", &data("three-mubs.json"), "--unital", "--fixed-delta", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["sieve"]["kept"], 0);

    let (code, r) = run(&["family", &data("one-basis.json"), "--fixed-delta", "0.1", "--samples", "50"]);
    assert_eq!(code, 0);
    for c in r["result"]["sieve"]["channels"].as_array().unwrap() {
        assert!((c["delta"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    }
}

#[test]
fn reports_are_deterministic_and_seeded() {
    let args = ["--no-timestamp", "family", &data("sic.json"), "--samples", "100"];
    let a = ompkit(&args, None).stdout;
    let b = ompkit(&args, None).stdout;
    assert_eq!(a, b);

    let seed_of = |out: &Output| {
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        r["result"]["sieve"]["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&ompkit(&args, None)), 0);
    let env = ompkit(&args, Some("42"));
    assert_eq!(seed_of(&env), 42);
    assert_ne!(env.stdout, a);
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "7"]);
    assert_eq!(seed_of(&ompkit(&flagged, Some("42"))), 7);
    assert_eq!(ompkit(&args, Some("not-a-number")).status.code(), Some(2));
}

#[test]
fn examples_table_and_json() {
    let out = ompkit(&["examples"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("5/5 PASS"));
    assert_eq!(text.matches(" PASS ").count(), 5);

    let (code, r) = run(&["examples", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["passed"], 5);
}

#[test]
fn corrupted_golden_fails_with_diff() {
    let mut golden: Value = serde_json::from_str(&std::fs::read_to_string(data("golden.json")).unwrap()).unwrap();
    golden["bb84"]["p_guess"]["value"] = serde_json::json!(0.6);
    let path = tmp("golden.json", &golden.to_string());
    let out = ompkit(&["examples", "--golden", &path], None);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bb84             FAIL"));
    assert!(text.contains("p_guess: expected 0.6"));
    assert!(text.contains("4/5 PASS"));
}

#[test]
fn output_flag_writes_report() {
    let dir = std::env::temp_dir().join(format!("ompkit-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = ompkit(&["--no-timestamp", "--output", path.to_str().unwrap(), "solve", &data("sic.json")], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}
