use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qtilde(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtilde"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn arches_reproduces_skeleton_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtilde(dir.path(), &["arches", "--r-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("skeleton_r0-3.csv")).unwrap();
    assert_eq!(
        csv,
        "r,a,u,v,two_a,v_plus,v_minus\n\
         0,3,4,10,6,2,2\n\
         1,11,19,41,22,5,8\n\
         2,43,82,168,86,15,28\n\
         3,171,337,679,342,50,98\n"
    );
    assert!(dir.path().join("delta_r0-3.csv").exists());
}

#[test]
fn verify_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtilde(dir.path(), &["verify", "--r-max", "4", "--k-max", "3"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("law2") && stdout.contains("(0 proved)"));
    let report = fs::read_to_string(dir.path().join("verify_r4_k3.csv")).unwrap();
    assert!(report.starts_with("identity,level,kind,status,detail\n"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qtilde(dir.path(), &["verify", "--r-max", "40"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qtilde(dir.path(), &["seq", "--n-max", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qtilde(dir.path(), &["words", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seq_outputs_are_deterministic_json() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        assert_eq!(
            qtilde(dir.path(), &["seq", "--n-max", "100", "--format", "json"])
                .status
                .code(),
            Some(0)
        );
        fs::read_to_string(dir.path().join("seq_qtilde_n100.json")).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(doc["rows"][21]["value"], 11);
    assert!(dir.path().join("seq_b_n100.json").exists());
}

#[test]
fn amplitude_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtilde(dir.path(), &["amplitude", "--r-max", "3", "--k-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let json = fs::read_to_string(dir.path().join("records_r0-2.json")).unwrap();
    let records: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(records[1]["T"], 6);
    assert_eq!(records[1]["margin"], 1);
    let stair = fs::read_to_string(dir.path().join("staircase_r1-3.csv")).unwrap();
    assert!(stair.contains("3,1,21\n3,2,6\n3,3,1\n"));
}
