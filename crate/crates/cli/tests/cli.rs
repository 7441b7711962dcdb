use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvxprev")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad json {e}: {text}")), out.status.code().unwrap())
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn check_r2_reports_sure_loss() {
    let (v, code) = run_json(&["check", &path("r2.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["verdicts"]["avoids_sure_loss"], false);
    assert_eq!(v["verdicts"]["convex"], true);
    assert_eq!(v["verdicts"]["centered_convex"], "n/a");
    assert_eq!(v["verdicts"]["coherent"], false);
    assert_eq!(v["k_bar"]["exact"], "-1/5");
    assert_eq!(v["witnesses"][0]["kind"], "sure_loss");
    assert_eq!(v["witnesses"][0]["sup_gain"]["exact"], "-1/5");
    for key in ["verdicts", "k_bar", "witnesses", "values", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn check_r1_is_coherent() {
    let (v, code) = run_json(&["check", &path("r1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"]["coherent"], true);
    assert_eq!(v["k_bar"]["exact"], "2/5");
    assert_eq!(v["values"]["1_a"]["decimal"], "0.6");
}

#[test]
fn exit_one_for_avoiding_sure_loss_only() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r4.json");
    fs::write(
        &file,
        r#"{"space":["a","b"],"gambles":{"1_a":["1","0"],"1_b":["0","1"],"zero":["0","0"]},
            "lower":{"1_a":"2/5","1_b":"1/5","zero":"-1/10"}}"#,
    )
    .unwrap();
    let (v, code) = run_json(&["check", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["verdicts"]["centered_convex"], false);
}

#[test]
fn malformed_inputs_exit_three() {
    let out = run(&["check", &path("bad_length.json")]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("gambles.1_a"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", r#"{"space": ["a"], "#),
        ("two.json", r#"{"space":["a"],"gambles":{"g":["1"]},"lower":{"g":"1"},"upper":{"g":"1"}}"#),
        ("none.json", r#"{"space":["a"],"gambles":{"g":["1"]}}"#),
        ("number.json", r#"{"space":["a"],"gambles":{"g":["1/0"]},"lower":{"g":"1"}}"#),
        ("missing.json", r#"{"space":["a"],"gambles":{"g":["1"]},"lower":{"h":"1"}}"#),
    ];
    for (name, text) in cases {
        let file = dir.path().join(name);
        fs::write(&file, text).unwrap();
        let out = run(&["check", file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3), "{name}");
    }
    let out = run(&["check", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["envelope", &path("r1.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn syntax_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    fs::write(&file, "{\n  \"space\": [\"a\",]\n}").unwrap();
    let out = run(&["check", file.to_str().unwrap()]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn extend_examples() {
    let (v, code) = run_json(&["extend", &path("r1.json"), "--gamble", "1_b"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["1_b"]["exact"], "-2/5");
    let dual = v["witnesses"].as_array().unwrap().iter().find(|w| w["kind"] == "dual").unwrap();
    assert_eq!(dual["r"]["exact"], "-2/5");
    assert_eq!(dual["masses"][0]["exact"], "1");

    let (v, _) = run_json(&["extend", &path("r1.json"), "--gamble", "1_b", "--kind", "natural"]);
    assert_eq!(v["values"]["1_b"]["exact"], "0");

    let out = run(&["extend", &path("r2.json"), "--gamble", "0,0", "--kind", "natural"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("unbounded"), "{text}");
    assert!(text.contains("incurs sure loss"), "{text}");
}

#[test]
fn correct_examples_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("centered.json");
    let (v, code) = run_json(&[
        "correct",
        &path("r2.json"),
        "--mode",
        "centered",
        "--output",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["ec_zero"]["exact"], "1/5");
    assert_eq!(v["before"]["verdicts"]["avoids_sure_loss"], false);
    let written: Value = serde_json::from_str(&fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(written["lower"]["1_a"], "1/2");
    assert_eq!(written["lower"]["1_b"], "1/2");
    assert_eq!(written["lower"]["zero"], "0");
    let (again, code) = run_json(&["check", out_file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(again["verdicts"], v["verdicts"]);
    assert_eq!(again["verdicts"]["centered_convex"], true);

    let (v, _) = run_json(&["correct", &path("r1.json"), "--mode", "shift"]);
    assert_eq!(v["corrected"]["lower"]["1_a"], "1");

    let (v, _) = run_json(&["correct", &path("r1.json"), "--mode", "centered", "--only-if-inconsistent"]);
    assert_eq!(v["applied"], false);
    assert_eq!(v["corrected"]["lower"]["1_a"], "3/5");
    assert!(v["corrected"]["lower"].get("zero").is_none());
}

#[test]
fn envelope_reports_attainment() {
    let (v, code) = run_json(&["envelope", &path("r4_envelope.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["values"]["1_a"]["exact"], "2/5");
    assert_eq!(v["values"]["1_b"]["exact"], "1/5");
    assert_eq!(v["values"]["zero"]["exact"], "-1/10");
    assert_eq!(v["attained_by"]["1_a"], 0);
    assert_eq!(v["attained_by"]["1_b"], 1);
    assert_eq!(v["attained_by"]["zero"], 0);
    assert_eq!(v["centered"], false);
}

#[test]
fn possibility_banner() {
    let out = run(&["possibility", &path("possibility.json")]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("unnormalised: incurs sure loss"), "{text}");
    let (v, _) = run_json(&["possibility", &path("possibility.json")]);
    assert_eq!(v["values"]["{a,b}"]["exact"], "4/5");
    assert_eq!(v["normalised"], false);
}

#[test]
fn risk_commands() {
    let (v, code) = run_json(&["risk", &path("risk_r2.json"), "classify"]);
    assert_eq!(code, 2);
    assert_eq!(v["risk_verdicts"]["convex"], true);
    assert_eq!(v["risk_verdicts"]["avoids_sure_loss"], false);
    assert_eq!(v["risk_verdicts"]["centered"], "n/a");
    assert_eq!(v["acceptability"]["1_a"], true);

    let (v, code) = run_json(&["risk", &path("risk_centered.json"), "liquidity", "--trials", "40", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);

    let (v, code) = run_json(&["risk", &path("risk_centered.json"), "axioms", "--trials", "40"]);
    assert_eq!(code, 0);
    assert!(v["seed"].is_u64());

    let (v, _) = run_json(&["risk", &path("risk_centered.json"), "extend", "--position", "x"]);
    assert_eq!(v["values"]["x"]["exact"], "1/2");

    let out = run(&["risk", &path("risk_r2.json"), "liquidity"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["risk", "RISK", "liquidity", "--trials", "30", "--seed", "3"],
        vec!["check", "R2"],
        vec!["correct", "R2", "--mode", "shift"],
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| match *a {
                "RISK" => path("risk_centered.json"),
                "R2" => path("r2.json"),
                other => other.to_string(),
            })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&args).stdout;
        let second = run(&args).stdout;
        assert_eq!(first, second);
    }
}
