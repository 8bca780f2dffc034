//! Black-box tests of the `rclab` binary: exit codes, stdout shapes,
//! artifact files, and byte-identical reruns of seeded commands.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use rclab::circuit::Circuit;

fn rclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rclab"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rclab-cli-{}-{test}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    dir
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = rclab(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = rclab(&["bounds", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_prints_integer_min_time() {
    let out = rclab(&["bounds", "--d", "3", "--I", "1e6"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "T = 100");
}

#[test]
fn bounds_with_no_demand_is_a_usage_error() {
    let out = rclab(&["bounds", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nothing to compute"));
}

#[test]
fn bounds_joint_reports_the_binding_constraint() {
    let out = rclab(&["bounds", "--d", "2", "--I", "100", "--E", "1e6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("T_throughput = 10"), "got: {text}");
    assert!(text.contains("T_landauer = 1000"), "got: {text}");
    assert!(text.contains("T = 1000 (binding: landauer)"), "got: {text}");
}

#[test]
fn gen_output_roundtrips_through_decode() {
    let out = rclab(&["gen", "--n", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let circuit = Circuit::decode(&stdout(&out)).expect("emitted encoding parses");
    assert_eq!(circuit.input_ids().len(), 9);
}

#[test]
fn check_passes_and_writes_the_report_artifact() {
    let dir = scratch("check");
    let out = rclab(&[
        "check",
        "--d",
        "2",
        "--sizes",
        "8,12,16,24",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).trim_end().ends_with("PASS"));
    let report = fs::read_to_string(dir.join("check-parity-d2.csv")).expect("artifact exists");
    assert!(report.starts_with("# rclab check v1\n"));
    assert_eq!(report.lines().count(), 2 + 4, "header + banner + 4 points");
}

#[test]
fn flux_random_walk_without_seed_is_a_usage_error() {
    let out = rclab(&["flux", "--d", "2", "--rule", "random-walk", "--ticks", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn seeded_flux_reruns_are_byte_identical() {
    let args = |dir: &str| {
        vec![
            "flux".to_string(),
            "--d".into(),
            "2".into(),
            "--rule".into(),
            "random-walk".into(),
            "--init".into(),
            "ball:6".into(),
            "--r0".into(),
            "3".into(),
            "--c-ball".into(),
            "0".into(),
            "--ticks".into(),
            "40".into(),
            "--seed".into(),
            "7".into(),
            "--out-dir".into(),
            dir.into(),
        ]
    };
    let (a, b) = (scratch("flux-a"), scratch("flux-b"));
    for dir in [&a, &b] {
        let argv = args(dir.to_str().unwrap());
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = rclab(&argv);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    let bytes_a = fs::read(a.join("flux-d2-randomwalk.csv")).unwrap();
    let bytes_b = fs::read(b.join("flux-d2-randomwalk.csv")).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "same seed must reproduce the same bytes");
}

#[test]
fn tm_divergence_free_run_exits_zero() {
    let out = rclab(&["tm", "--machine", "busy-beaver"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("halted=true"), "got: {text}");
    assert!(text.contains("machine and lattice agree"), "got: {text}");
}

#[test]
fn embed_reports_a_verified_placement() {
    let dir = scratch("embed");
    let out = rclab(&[
        "embed",
        "--n",
        "12",
        "--d",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = fs::read_to_string(dir.join("embed-parity-n12-d3.json")).expect("artifact");
    assert!(report.contains("\"format\": \"rclab embed v1\""));
}

#[test]
fn embed_rejects_giving_both_circuit_and_size() {
    let out = rclab(&["embed", "--n", "4", "--circuit", "whatever.txt"]);
    assert_eq!(out.status.code(), Some(2));
}
