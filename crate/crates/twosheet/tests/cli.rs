use std::io::Write;
use std::process::Command;

use serde_json::Value;
use twosheet::cli::{run_with, EXIT_INPUT, EXIT_OK, EXIT_STOPPED, EXIT_UNVERIFIED};

fn cdc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cdc").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn records(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cdc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

#[test]
fn run_family_succeeds() {
    let (code, out, err) = cdc(&["run", "--family", "petersen"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(err.is_empty());
    let r = &records(&out)[0];
    assert_eq!(r["graph"], "petersen");
    assert_eq!(r["status"], "success");
    assert_eq!(r["report"]["verify"]["ok"], true);
    assert!(r.get("oracle").is_none());
}

#[test]
fn run_with_oracle_and_trace() {
    let (code, out, _) = cdc(&["run", "--family", "complete:4", "--oracle", "--trace"]);
    assert_eq!(code, EXIT_OK);
    let r = &records(&out)[0];
    assert_eq!(r["oracle"]["status"], "found");
    assert_eq!(r["oracle"]["agrees"], true);
    assert!(r["report"]["trace"].as_array().unwrap().len() > 1);
}

#[test]
fn random_family_needs_seed() {
    let (code, out, err) = cdc(&["gen", "--family", "random-cubic:10"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("--seed"));
    let (code, a, _) = cdc(&["gen", "--family", "random-cubic:10", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    let (_, b, _) = cdc(&["gen", "--family", "random-cubic:10:3"]);
    assert_eq!(a, b);
}

#[test]
fn gen_formats() {
    let (_, edges, _) = cdc(&["gen", "--family", "complete:3"]);
    assert_eq!(edges, "# K3\n0 1\n0 2\n1 2\n");
    let (_, json, _) = cdc(&["gen", "--family", "complete:3", "--format", "json"]);
    assert_eq!(records(&json)[0]["edges"], serde_json::json!([[0, 1], [0, 2], [1, 2]]));
    let (_, dot, _) = cdc(&["gen", "--family", "complete:3", "--format", "dot"]);
    assert!(dot.contains("0 -- 1"));
    let (_, corpus, _) = cdc(&["gen", "--corpus", "--format", "json"]);
    assert_eq!(corpus.lines().count(), 115);
}

#[test]
fn bridged_file_is_rejected() {
    let p = temp_file("bridge.txt", "0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n");
    let (code, out, err) = cdc(&["run", "--file", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!err.is_empty());
    let r = &records(&out)[0];
    assert_eq!(r["status"], "invalid_input");
    assert_eq!(r["verdict"]["reason"], "bridge");
    assert_eq!(r["verdict"]["edge"], serde_json::json!([2, 3]));
}

#[test]
fn malformed_file_is_an_input_error() {
    let p = temp_file("bad.txt", "0 1\n1 x\n");
    let (code, out, err) = cdc(&["run", "--file", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn stop_reports_exit_two() {
    // the reduction cannot finish in zero rounds here
    let (code, out, _) = cdc(&["run", "--family", "petersen", "--max-iterations", "0"]);
    assert_eq!(code, EXIT_STOPPED);
    let r = &records(&out)[0];
    assert_eq!(r["status"], "non_termination");
    assert!(r["report"]["snapshot"].is_object());
}

#[test]
fn verify_accepts_and_rejects() {
    let g = temp_file("k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let good = temp_file("faces.txt", "0 1 2 0\n0 1 3 0\n0 2 3 0\n1 2 3 1\n");
    let json = temp_file("faces.json", r#"{"cycles": [[0,1,2,0],[0,1,3,0],[0,2,3,0],[1,2,3,1]]}"#);
    let bad = temp_file("short.txt", "0 1 2 0\n0 1 3 0\n");
    let gp = g.to_str().unwrap();
    let (code, out, _) = cdc(&["verify", "--file", gp, "--cycles", good.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(records(&out)[0]["ok"], true);
    assert_eq!(
        cdc(&["verify", "--file", gp, "--cycles", json.to_str().unwrap()]).0,
        EXIT_OK
    );
    let (code, out, _) = cdc(&["verify", "--file", gp, "--cycles", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_UNVERIFIED);
    assert_eq!(records(&out)[0]["ok"], false);
}

#[test]
fn oracle_command() {
    let (code, out, _) = cdc(&["oracle", "--family", "petersen"]);
    assert_eq!(code, EXIT_OK);
    let r = &records(&out)[0];
    assert_eq!(r["status"], "found");
    assert_eq!(r["verified"], true);
    let (code, _, _) = cdc(&["oracle", "--family", "complete:8"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn embed_commands() {
    let (code, out, _) = cdc(&["embed", "--table"]);
    assert_eq!(code, EXIT_OK);
    let genera: Vec<i64> = records(&out).iter().map(|r| r["genus"].as_i64().unwrap()).collect();
    assert_eq!(genera, vec![0, 0, 1, 3, 6, 10]);
    let (code, out, _) = cdc(&["embed", "--fixture", "k5-torus"]);
    assert_eq!(code, EXIT_OK);
    let r = &records(&out)[0];
    assert_eq!(r["faces_as_cdc"]["histogram"], serde_json::json!({"2": 10}));
    assert_eq!(
        r["non_cycle_faces"][0]["repeated_edges"],
        serde_json::json!([[1, 2], [3, 4]])
    );
    assert_eq!(cdc(&["embed", "--k", "2"]).0, EXIT_INPUT);
    assert_eq!(cdc(&["embed", "--k", "9"]).0, EXIT_INPUT);
}

#[test]
fn report_summarizes() {
    let (code, out, _) = cdc(&["report", "--family", "flower-snark:5"]);
    assert_eq!(code, EXIT_OK);
    let r = &records(&out)[0];
    assert_eq!(r["graphs"], 1);
    assert_eq!(r["verified"], 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cdc(&["run"]).0, EXIT_INPUT);
    assert_eq!(cdc(&["run", "--family", "petersen", "--corpus"]).0, EXIT_INPUT);
    assert_eq!(cdc(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(cdc(&["run", "--family", "nonsense"]).0, EXIT_INPUT);
}

#[test]
fn binary_matches_library_entry() {
    let out = Command::new(env!("CARGO_BIN_EXE_cdc"))
        .args(["run", "--family", "prism:4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        cdc(&["run", "--family", "prism:4"]).1
    );
}
