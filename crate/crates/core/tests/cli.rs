use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eopgap::io;
use eopgap::qdense::fixtures;
use eopgap::stab::{format_tableau, ghz_tableau};
use serde_json::Value;

const LN2: f64 = std::f64::consts::LN_2;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eopgap"));
    c.env_remove("EOPGAP_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout {:?} stderr {:?}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_ghz3_tableau(dir: &Path) -> PathBuf {
    let p = dir.join("ghz3.txt");
    std::fs::write(&p, format_tableau(&ghz_tableau(3).unwrap())).unwrap();
    p
}

#[test]
fn analyze_ghz3_tableau() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_ghz3_tableau(dir.path());
    let out = run(&["analyze", path_str(&p)]);
    assert!(out.status.success());
    let v = json_of(&out);
    let counts = &v["stabilizer"]["tripartitions"][0]["counts"];
    assert_eq!(counts["locals"], serde_json::json!([0, 0, 0]));
    assert_eq!(counts["g"], 1);
    assert_eq!(counts["e_ab"], 0);
    let s_a = v["entropies"][0]["value"].as_f64().unwrap();
    assert!((s_a - LN2).abs() < 1e-12);
}

#[test]
fn analyze_bell_pair() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bell.json");
    io::write_pure(&p, &fixtures::bell()).unwrap();
    let out = run(&["analyze", path_str(&p)]);
    assert!(out.status.success());
    let v = json_of(&out);
    let pair = &v["pairs"][0];
    assert!((pair["mutual_information"].as_f64().unwrap() - 2.0 * LN2).abs() < 1e-12);
    assert!(pair["markov_gap"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    let text = io::pure_to_json(&fixtures::bell()).unwrap();
    std::fs::write(&p, &text[..text.len() / 2]).unwrap();
    let out = run(&["analyze", path_str(&p)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let t = dir.path().join("bad.txt");
    std::fs::write(&t, "n=3\nXXX\nZZ\n").unwrap();
    assert_eq!(run(&["analyze", path_str(&t)]).status.code(), Some(1));
}

fn pipeline(psi: &eopgap::qdense::PureState, alpha: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    io::write_pure(&state, psi).unwrap();
    let res = dir.path().join("eop.json");
    let out = run(&["eop", path_str(&state), "--alpha", alpha, "--restarts", "3", "--out", path_str(&res)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["recover", path_str(&state), "--from-eop", path_str(&res)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    json_of(&out)
}

#[test]
fn ghz4_pipeline_satisfies_the_bound() {
    let v = pipeline(&fixtures::ghz(4), "A;B;C");
    assert_eq!(v["bound_satisfied"], true);
    assert_eq!(v["schema_version"], 1);
    assert!(v["minus_two_log_F"].as_f64().is_some());
}

#[test]
fn two_producible_pipeline_recovers_exactly() {
    let v = pipeline(&fixtures::triangle(), "A;B");
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-8, "{v}");
}

#[test]
fn mismatched_result_is_a_version_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    io::write_pure(&a, &fixtures::ghz(3)).unwrap();
    io::write_pure(&b, &fixtures::w(3)).unwrap();
    let res = dir.path().join("eop.json");
    assert!(run(&["eop", path_str(&a), "--out", path_str(&res)]).status.success());
    let out = run(&["recover", path_str(&b), "--from-eop", path_str(&res)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));

    let text = std::fs::read_to_string(&res).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 99");
    std::fs::write(&res, text).unwrap();
    let out = run(&["recover", path_str(&a), "--from-eop", path_str(&res)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_ghz4_tableau_is_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ghz4.txt");
    std::fs::write(&p, format_tableau(&ghz_tableau(4).unwrap())).unwrap();
    let out = run(&["certify", path_str(&p), "--groups", "A=0;B=1;C=2;D=3", "--restarts", "2"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["verdict"], "refuted");
}

#[test]
fn scan_csv_is_identical_across_thread_counts() {
    let args = ["scan", "--n-list", "10,20", "--samples", "200", "--format", "csv", "--seed", "7"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let two = run(&[&args[..], &["--threads", "3"]].concat());
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "N,party_sizes,pair,P_EN_pos,SE_EN,P_g_pos,SE_g,P_SA_pos,mean_SA,bound_pair,bound_page"
    );
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn env_var_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["scan", "--n-list", "10", "--samples", "20"])
        .env("EOPGAP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bad_scan_config_fails() {
    assert_eq!(run(&["scan", "--n-list", "11"]).status.code(), Some(1));
    assert_eq!(run(&["scan", "--samples", "0"]).status.code(), Some(1));
}
