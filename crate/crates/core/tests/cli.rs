use std::process::{Command, Output};

use serde_json::Value;

fn qdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiff")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = qdiff(args);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&out)));
    (code(&out), doc)
}

fn assert_envelope(doc: &Value, command: &str) {
    for key in ["command", "parameters", "status", "cases", "max_error", "runtime_ms"] {
        assert!(doc.get(key).is_some(), "{command}: missing {key}");
    }
    assert_eq!(doc["command"], command);
    assert!(doc["parameters"].is_object());
    assert!(doc["cases"].is_u64());
    assert!(doc["max_error"].is_number());
    assert!(doc["runtime_ms"].is_u64());
}

#[test]
fn expand_text_examples() {
    let cases = [
        (&["expand", "--family", "qhermite", "--n", "2"][..], "4*x^2 + (-1 + q)\n"),
        (&["expand", "--family", "qinv", "--n", "1"], "2*x\n"),
        (&["expand", "--family", "hermite", "--n", "3"], "8*x^3 - 12*x\n"),
        (&["expand", "--family", "qinv", "--n", "2"], "4*x^2 + (-q^-1 + 1)\n"),
    ];
    for (args, want) in cases {
        let out = qdiff(args);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), want, "{args:?}");
    }
}

#[test]
fn expand_listing_and_specialization() {
    let out = stdout(&qdiff(&["expand", "--max-n", "2"]));
    assert_eq!(out, "n=0: 1\nn=1: 2*x\nn=2: 4*x^2 + (-1 + q)\n");
    let out = stdout(&qdiff(&["expand", "--n", "2", "--q", "1/2"]));
    assert!(out.contains("at q = 1/2: 4*x^2 - 1/2"), "{out}");
}

#[test]
fn expand_json_and_csv() {
    let (c, doc) = json(&["expand", "--n", "2", "--format", "json"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "expand");
    assert_eq!(doc["status"], "verified");
    assert_eq!(doc["results"][0]["polynomial"], "4*x^2 + (-1 + q)");
    let csv = stdout(&qdiff(&["expand", "--n", "1", "--format", "csv"]));
    assert_eq!(csv, "n,k,coefficient,value_at_q\n1,0,0,\n1,1,2,\n");
}

#[test]
fn expand_requires_a_degree() {
    assert_eq!(code(&qdiff(&["expand"])), 2);
    assert_eq!(code(&qdiff(&["expand", "--n", "1", "--max-n", "2"])), 2);
    assert_eq!(code(&qdiff(&["expand", "--family", "laguerre", "--n", "1"])), 2);
}

#[test]
fn apply_prints_eigenvalue_and_legend() {
    let out = qdiff(&["apply", "--op", "cald", "--n", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "(2*s^-1)*x\neigenvalue: s^-1\nwhere s = q^(1/2)\n");
    // Even powers of s are shown in q and need no legend.
    let out = stdout(&qdiff(&["apply", "--op", "cald", "--n", "2"]));
    assert_eq!(out, "(4*q^-1)*x^2 + (-q^-1 + 1)\neigenvalue: q^-1\n");

    let (c, doc) = json(&["apply", "--op", "tilde-d", "--family", "qinv", "--n", "3", "--format", "json"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "apply");
    assert_eq!(doc["eigenvalue"], "s^3");

    let (_, doc) = json(&["apply", "--op", "dq", "--n", "1", "--format", "json"]);
    assert_eq!(doc["eigenvalue"], Value::Null);
}

#[test]
fn apply_rejects_mismatched_variable() {
    assert_eq!(code(&qdiff(&["apply", "--op", "tilde-d", "--n", "1"])), 2);
    assert_eq!(code(&qdiff(&["apply", "--op", "cald", "--family", "qinv", "--n", "1"])), 2);
    assert_eq!(code(&qdiff(&["apply", "--op", "nope", "--n", "1"])), 2);
}

#[test]
fn verify_examples() {
    let (c, doc) = json(&["verify", "--identity", "eq14", "--max-n", "30"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "verify");
    assert_eq!(doc["status"], "verified");
    assert_eq!(doc["cases"], 31);
    assert_eq!(doc["max_error"], 0.0);
    assert_eq!(doc["first_failure"], Value::Null);

    let (c, doc) = json(&["verify", "--identity", "eq20", "--max-n", "30"]);
    assert_eq!((c, doc["status"].as_str()), (0, Some("verified")));

    let (c, doc) = json(&["verify", "--identity", "eq14", "--max-n", "2", "--mutate"]);
    assert_eq!(c, 1);
    assert_envelope(&doc, "verify");
    assert_eq!(doc["status"], "failed");
    assert_eq!(doc["first_failure"]["n"], 0);
    assert_eq!(doc["first_failure"]["verified"], false);
}

#[test]
fn verify_every_identity_small() {
    for id in ["eq3", "eq7", "eq8", "eq12", "eq14", "eq15", "eq18", "eq20", "genfun-h", "product-rule"] {
        let (c, doc) = json(&["verify", "--identity", id, "--max-n", "3", "--cases", "5"]);
        assert_eq!(c, 0, "{id}");
        assert_eq!(doc["status"], "verified", "{id}");
        let (c, _) = json(&["verify", "--identity", id, "--max-n", "3", "--cases", "5", "--mutate"]);
        assert_eq!(c, 1, "{id} mutated");
    }
}

#[test]
fn verify_text_and_csv() {
    let out = stdout(&qdiff(&["verify", "--identity", "eq12", "--max-n", "4", "--format", "text"]));
    assert_eq!(out, "eq12: 5/5 verified\n");
    let csv = stdout(&qdiff(&["verify", "--identity", "eq14", "--max-n", "1", "--format", "csv"]));
    assert_eq!(csv, "name,n,verified,residual\neq14,0,true,0\neq14,1,true,0\n");
}

#[test]
fn verify_rejects_unknown_identity() {
    assert_eq!(code(&qdiff(&["verify", "--identity", "eq99"])), 2);
    assert_eq!(code(&qdiff(&["verify"])), 2);
}

#[test]
fn mutate_is_hidden_from_help() {
    let out = qdiff(&["verify", "--help"]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).contains("mutate"));
}

#[test]
fn ortho_examples() {
    let (c, doc) = json(&["ortho", "--q", "1/2", "--max-n", "8"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "ortho");
    let meta = &doc["metadata"];
    assert_eq!(meta["q"], "1/2");
    assert_eq!(meta["nodes"], 400);
    assert!(meta["truncation"].as_u64().unwrap() > 0);
    assert!(meta["max_off_diagonal"].as_f64().unwrap() < 1e-10);
    assert!(meta["max_diagonal_rel_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(doc["matrix"].as_array().unwrap().len(), 9);

    let (c, doc) = json(&["ortho", "--q", "1/2", "--max-n", "0"]);
    assert_eq!(c, 0);
    let v = doc["matrix"][0][0].as_f64().unwrap();
    assert!((v - 3.462746619).abs() < 1e-9, "{v}");
}

#[test]
fn ortho_fails_with_too_few_nodes() {
    let (c, doc) = json(&["ortho", "--q", "1/2", "--max-n", "8", "--nodes", "6"]);
    assert_eq!(c, 1);
    assert_eq!(doc["status"], "failed");
}

#[test]
fn ortho_domain_guard() {
    for q in ["3/2", "1", "0", "-1/2", "0.5", "1e-1", "1/0", "half"] {
        let out = qdiff(&["ortho", "--q", q]);
        assert_eq!(code(&out), 2, "q = {q}");
    }
    let err = String::from_utf8(qdiff(&["ortho", "--q", "0.5"]).stderr).unwrap();
    assert!(err.contains("fraction"), "{err}");
    assert_eq!(code(&qdiff(&["ortho", "--q", "1/2", "--nodes", "1"])), 2);
}

#[test]
fn ortho_csv_is_a_matrix() {
    let csv = stdout(&qdiff(&["ortho", "--q", "1/2", "--max-n", "2", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n0,n1,n2");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));
}

#[test]
fn limit_examples() {
    let (c, doc) = json(&["limit", "--which", "eq16", "--n", "2"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "limit");
    assert!(doc["deviations"].as_array().unwrap().iter().all(|d| d == 0.0));
    assert_eq!(doc["q_sequence"][0], "15/16");
    assert_eq!(doc["q_sequence"].as_array().unwrap().len(), 9);

    let (c, doc) = json(&["limit", "--which", "eq16", "--n", "3"]);
    assert_eq!(c, 0);
    for r in doc["ratios"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 0.5).abs() < 1e-12);
    }

    let (c, doc) = json(&["limit", "--which", "eq17", "--m", "0"]);
    assert_eq!(c, 0);
    assert_eq!(doc["exact_zero"], true);
}

#[test]
fn limit_fails_outside_the_ratio_band() {
    let (c, doc) = json(&["limit", "--which", "eq16", "--n", "3", "--ratio-lo", "0.6", "--ratio-hi", "0.9"]);
    assert_eq!(c, 1);
    assert_eq!(doc["status"], "failed");
}

#[test]
fn limit_usage_errors() {
    assert_eq!(code(&qdiff(&["limit", "--which", "eq18", "--n", "1"])), 2);
    assert_eq!(code(&qdiff(&["limit", "--which", "eq16"])), 2);
    assert_eq!(code(&qdiff(&["limit", "--which", "eq16", "--n", "1", "--k-min", "9", "--k-max", "3"])), 2);
}

#[test]
fn table_shape() {
    let (c, doc) = json(&["table", "--q", "1/2", "--max-n", "2", "--points", "3"]);
    assert_eq!(c, 0);
    assert_envelope(&doc, "table");
    assert_eq!(doc["columns"], serde_json::json!(["x", "p0", "p1", "p2"]));
    // H_2(1 | 1/2) = 4 - 1/2.
    assert_eq!(doc["rows"][2], serde_json::json!([1.0, 1.0, 2.0, 3.5]));
    let csv = stdout(&qdiff(&["table", "--q", "1/2", "--max-n", "1", "--points", "2", "--format", "csv"]));
    assert_eq!(csv.lines().next(), Some("x,p0,p1"));
    assert_eq!(code(&qdiff(&["table", "--q", "2"])), 2);
}

#[test]
fn output_is_byte_identical_without_timing() {
    let runs: &[&[&str]] = &[
        &["verify", "--identity", "product-rule", "--cases", "10", "--no-timing"],
        &["ortho", "--q", "3/4", "--max-n", "4", "--no-timing"],
        &["limit", "--which", "eq17", "--m", "3", "--no-timing"],
        &["table", "--q", "1/3", "--family", "qinv", "--no-timing"],
        &["expand", "--max-n", "5", "--format", "json", "--no-timing"],
        &["apply", "--op", "aq", "--n", "4", "--format", "json", "--no-timing"],
    ];
    for args in runs {
        let a = qdiff(args);
        let b = qdiff(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(doc["runtime_ms"], 0);
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&qdiff(&["--help"])), 0);
    assert_eq!(code(&qdiff(&["--version"])), 0);
    assert_eq!(code(&qdiff(&[])), 2);
}
