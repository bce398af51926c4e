use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::{NamedTempFile, TempDir};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dimgroup"));
    c.env_remove("DIMGROUP_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn decide_reads_text_files() {
    let a = matrix_file("2 2\n1 1\n2 0\n");
    let b = matrix_file("2 2\n0 1\n2 1\n");
    let out = run(&["decide", a.path().to_str().unwrap(), b.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "equivalent");
    assert_eq!(v["witness"]["matrix"], serde_json::json!([["1", "0"], ["1", "1"]]));
    assert_eq!(v["witness"]["mu"], "1");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn output_is_byte_stable() {
    let args = ["decide", "[[65,7],[24,67]]", "[[65,24],[7,67]]"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let v = json(&first);
    assert_eq!(v["verdict"], "not_equivalent");
    assert!(v["certificate"]["invariant"].as_str().unwrap().starts_with("rational-case D-search"));
    assert_ne!(v["certificate"]["value_A"], v["certificate"]["value_B"]);
}

#[test]
fn expect_flag_sets_exit_code() {
    let args = ["decide", "[[65,7],[24,67]]", "[[65,24],[7,67]]", "--expect"];
    let mut miss = args.to_vec();
    miss.push("equivalent");
    assert_eq!(run(&miss).status.code(), Some(1));
    let mut hit = args.to_vec();
    hit.push("not-equivalent");
    assert_eq!(run(&hit).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(run(&["decide", "[[1,2],[3]]", "[[1]]"]).status.code(), Some(2));
    assert_eq!(run(&["decide", "/nonexistent/matrix", "[[1]]"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let bad = matrix_file("2 2\n1 1\n");
    assert_eq!(run(&["analyze", bad.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn preconditions_exit_three() {
    assert_eq!(run(&["decide", "[[1,-1],[1,0]]", "[[1,1],[1,0]]"]).status.code(), Some(3));
    assert_eq!(run(&["decide", "[[1,0],[0,1]]", "[[1,1],[1,0]]"]).status.code(), Some(3));
    assert_eq!(run(&["cc", "--m1", "6", "--m2", "2", "--f", "1", "--n", "1"]).status.code(), Some(3));
    assert_eq!(run(&["analyze", "[[19,5],[4,1]]", "--prime", "3"]).status.code(), Some(3));
}

#[test]
fn analyze_reports_the_trace_module() {
    let v = json(&run(&["analyze", "[[19,5],[4,1]]"]));
    assert_eq!(v["trace_module"]["basis"], serde_json::json!(["2", "-5+ω"]));
    assert_eq!(v["det"], "-1");
    let v = json(&run(&["analyze", "[[1,1],[2,0]]", "--prime", "2", "--precision", "10"]));
    assert_eq!(v["row_space"]["precision"], 10);
    assert_eq!(v["ulm"]["2"], 1);
}

#[test]
fn verify_accepts_rational_witnesses() {
    let out = run(&["verify", "[[1,5],[3,3]]", "[[1,3],[5,3]]", "[[1,2],[2,3]]"]);
    assert_eq!(json(&out)["status"], "verified");
    let out = run(&["verify", "[[1,5],[3,3]]", "[[1,3],[5,3]]", "[[\"1/2\",0],[0,1]]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(json(&out)["status"], "verified");
}

#[test]
fn cc_lists_residues() {
    let v = json(&run(&["cc", "--m1", "7", "--m2", "1", "--f", "2", "--n", "1"]));
    assert_eq!(v["residues"], serde_json::json!([[["2"]], [["5"]]]));
}

#[test]
fn corpus_table_and_json() {
    let out = run(&["corpus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("12 of 12 passed"));
    let v = json(&run(&["corpus", "--json"]));
    let rows = v["examples"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn config_file_from_environment() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"height": 2, "candidate_cap": 99}"#).unwrap();
    let out = bin().args(["decide", "[[1,1],[2,0]]", "[[1,2],[1,0]]"]).env("DIMGROUP_CONFIG", &path).output().unwrap();
    let v = json(&out);
    assert_eq!(v["config"]["height"], 2);
    assert_eq!(v["config"]["candidate_cap"], 99);
    // flags win over the file
    let out = bin()
        .args(["decide", "[[1,1],[2,0]]", "[[1,2],[1,0]]", "--height", "5"])
        .env("DIMGROUP_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["height"], 5);
    std::fs::write(&path, "{\"bogus\": 1}").unwrap();
    let out = bin().args(["decide", "[[1,1],[2,0]]", "[[1,2],[1,0]]"]).env("DIMGROUP_CONFIG", &path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn default_config_file_in_working_directory() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("dimgroup.json"), r#"{"n_max": 3}"#).unwrap();
    let out = bin().args(["decide", "[[1,1],[2,0]]", "[[1,2],[1,0]]"]).current_dir(dir.path()).output().unwrap();
    assert_eq!(json(&out)["config"]["n_max"], 3);
}
