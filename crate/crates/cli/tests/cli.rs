use std::process::{Command, Output};

use serde_json::Value;

fn gcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcalc")).args(args).env_remove("GCALC_SEED").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn ddcheck_passes() {
    let out = gcalc(&["operad-ddcheck", "--max-arity", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn weights_carry_error_bars_and_reproduce() {
    let args = ["weight", "--graph", "4;5;3>1,3>2,4>1,4>2,2>1", "--propagator", "kontsevich-outer", "--space", "cn", "--samples", "2e4", "--seed", "7"];
    let a = gcalc(&args);
    let b = gcalc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["std_error"].as_f64().unwrap() > 0.0);
    assert_eq!(v["samples"], 20000);
    assert_eq!(v["seed"], 7);
    let analytic = json(&gcalc(&["weight", "--graph", "4;5;3>1,3>2,4>1,4>2,2>1", "--analytic"]));
    assert_eq!(analytic["exact"], "1/12");
    assert_eq!(analytic["std_error"], 0.0);
}

#[test]
fn zeta_box_integral_reports_oracle() {
    let v = json(&gcalc(&["zeta", "--n", "2", "--samples", "1e5", "--seed", "1"]));
    let est = v["value_re"].as_f64().unwrap();
    assert!((est - 1.644_934).abs() / 1.644_934 < 0.01);
    assert_eq!(v["within_tolerance"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gcalc(&["weight", "--graph", "4;5;3>1"]).status.code(), Some(2));
    assert_eq!(gcalc(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(gcalc(&["zeta", "--n", "2", "--samples", "1.5"]).status.code(), Some(2));
    assert_eq!(gcalc(&["zeta", "--n", "2", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn failed_verification_exits_with_one() {
    let out = gcalc(&["verify-appendix4", "--samples", "2000", "--tolerance", "1e-6", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn seed_precedence_flag_config_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\nsamples = \"1e3\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&gcalc(&["zeta", "--n", "3", "--config", cfg]));
    assert_eq!((v["seed"].as_u64(), v["samples"].as_u64()), (Some(5), Some(1000)));
    let v = json(&gcalc(&["zeta", "--n", "3", "--config", cfg, "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    let out = Command::new(env!("CARGO_BIN_EXE_gcalc"))
        .args(["zeta", "--n", "3", "--samples", "1000"])
        .env("GCALC_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 11);
    std::fs::write(dir.path().join("bad.toml"), "sed = 1\n").unwrap();
    let bad = dir.path().join("bad.toml");
    assert_eq!(gcalc(&["zeta", "--n", "3", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_and_text_formats() {
    let out = gcalc(&["graphs", "--n", "3", "--edges", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph,odd,automorphisms\n"));
    let out = gcalc(&["schouten", "--a", "x1*psi{2}", "--b", "x2^2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result: 2 * x1*x2"), "{}", text);
}

#[test]
fn mu_from_a_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, r#"{"fallback": "0", "entries": [{"kind": "out", "graph": "2;1;1>2", "value": "1"}]}"#).unwrap();
    let p = path.to_str().unwrap();
    let mu = json(&gcalc(&["mu", "--arg", "x1*psi{2}", "--arg", "x2^2", "--table", p]));
    let br = json(&gcalc(&["schouten", "--a", "x1*psi{2}", "--b", "x2^2"]));
    assert_eq!(mu["result"], br["result"]);
    std::fs::write(&path, r#"{"entries": []}"#).unwrap();
    assert_eq!(gcalc(&["mu", "--arg", "x1", "--arg", "x2", "--table", p]).status.code(), Some(2));
}

#[test]
fn duflo_and_flow_commands() {
    let v = json(&gcalc(&["duflo", "--order", "4"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["exponent_c2"], "1/48");
    let v = json(&gcalc(&["flow", "--alpha", "x3*psi{1}*psi{2} - x2*psi{1}*psi{3} + x1*psi{2}*psi{3}"]));
    assert_eq!(v["flow"], "0");
    assert_eq!(v["bracket_with_alpha_vanishes"], true);
    let v = json(&gcalc(&["transform", "--alpha", "x1*x2*psi{1}*psi{2}", "--order", "2"]));
    assert_eq!(v["bracket_vanishes"], true);
}
