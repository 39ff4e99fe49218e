//! Black-box tests of the command-line binary: output shapes, JSON mode,
//! and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgroup"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn nf_prints_the_normal_form() {
    let out = run(&["nf", "x1 x0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "x0 x2");
}

#[test]
fn nf_of_the_identity_is_the_empty_word() {
    let out = run(&["nf", "x0 x0^-1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "");
}

#[test]
fn mul_inv_phi() {
    assert_eq!(stdout(&run(&["mul", "x0", "x1"])), "x0 x1");
    assert_eq!(stdout(&run(&["inv", "x0 x1^-1"])), "x1 x0^-1");
    assert_eq!(stdout(&run(&["phi", "x0 x1", "2"])), "x2 x3");
}

#[test]
fn json_output_is_structured() {
    let out = run(&["nf", "x1 x0", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["word"], "x0 x2");
    assert_eq!(value["pos"], serde_json::json!([[0, 1], [2, 1]]));

    let out = run(&["plmap", "x0", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["tail"], 1);
}

#[test]
fn norm_and_ball() {
    assert_eq!(stdout(&run(&["norm", "x0 x1^-1", "--max-radius", "6"])), "2");
    assert_eq!(stdout(&run(&["norm", "x0^5", "--max-radius", "3"])), "> 3");
    let out = run(&["ball", "2", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["spheres"], serde_json::json!([1, 4, 12]));
}

#[test]
fn embed_single_and_multi() {
    assert_eq!(stdout(&run(&["embed", "x0", "--k", "0"])), "x2");
    assert_eq!(stdout(&run(&["embed", "", "--k", "1"])), "x0 x1^-1");
    let out = run(&["embed", "x0", "--k", "1,1"]);
    assert!(out.status.success());
    assert!(!stdout(&out).is_empty());
}

#[test]
fn check_passes() {
    let out = run(&["check", "--max-index", "4", "--samples", "20"]);
    assert!(out.status.success());
}

#[test]
fn distort_reports_the_envelope() {
    let out = run(&["distort", "--subgroup", "fxz", "--h-radius", "2", "--f-radius", "6", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["envelope_ok"], true);
    assert_eq!(value["generator_set"], "fxz");
}

#[test]
fn malformed_input_exits_one_with_a_diagnostic() {
    for args in [
        &["nf", "x1 +"][..],
        &["mul", "x0", "y1"],
        &["norm", "x0^0"],
        &["distort", "--subgroup", "fxz^n:0"],
        &["distort", "--subgroup", "nonsense words"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "args {args:?}"
        );
    }
}

#[test]
fn cap_exhaustion_is_a_domain_error() {
    let out = run(&["ball", "12", "--cap-states", "100"]);
    assert_eq!(out.status.code(), Some(1));
}
