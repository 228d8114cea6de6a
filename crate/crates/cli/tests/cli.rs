use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap"))
        .args(args)
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn value_bits(args: &[&str]) -> f64 {
    json_of(&qcap(args))["value_bits"].as_f64().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn capacity_examples() {
    let v = value_bits(&[
        "capacity",
        "--example",
        "pauli:0.5,1/6,1/6,1/6",
        "--restarts",
        "4",
    ]);
    assert!((v - 0.081704).abs() < 1e-4);
    let v = value_bits(&["capacity", "--example", "identity:3", "--restarts", "2"]);
    assert!((v - 1.584963).abs() < 1e-6);
    let v = value_bits(&["capacity", "--example", "vdc", "--restarts", "4"]);
    assert!((v - 0.084963).abs() < 1e-4);
}

#[test]
fn eof_examples() {
    let v = value_bits(&[
        "eof",
        "--example",
        "rho_T:0.5,1/6,1/6,1/6",
        "--restarts",
        "4",
    ]);
    assert!((v - 0.918296).abs() < 1e-3);
    let out = json_of(&qcap(&["eof", "--example", "bell", "--restarts", "2"]));
    assert!((out["value_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((out["oracle_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let out = json_of(&qcap(&[
        "eof",
        "--example",
        "antisym-mixed",
        "--restarts",
        "4",
    ]));
    assert!((out["value_bits"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert!(out.get("oracle_bits").is_none());
}

#[test]
fn state_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pure = write(
        dir.path(),
        "pure.json",
        &format!(r#"{{"dims": [2, 2], "vector": [[{h}, 0], [0, 0], [0, 0], [{h}, 0]]}}"#),
    );
    assert!((value_bits(&["eof", "--state", &pure, "--restarts", "1"]) - 1.0).abs() < 1e-9);
    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"{"dims": [2, 2], "matrix": [[[0.25,0],[0,0],[0,0],[0,0]],[[0,0],[0.25,0],[0,0],[0,0]],[[0,0],[0,0],[0.25,0],[0,0]],[[0,0],[0,0],[0,0],[0.25,0]]]}"#,
    );
    assert!(value_bits(&["eof", "--state", &mixed, "--restarts", "2"]).abs() < 1e-6);
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dims": [2, 2], "matrix": [[1,0]]}"#,
    );
    assert_eq!(qcap(&["eof", "--state", &bad]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let corrupt = write(dir.path(), "c.json", "{not json");
    let not_tp = write(
        dir.path(),
        "n.json",
        r#"{"in_dim": 2, "out_dim": 2, "kraus": [[[1,0],[0,0],[0,0],[0.5,0]]]}"#,
    );
    for args in [
        vec!["capacity", "--channel", corrupt.as_str()],
        vec!["capacity", "--channel", not_tp.as_str()],
        vec!["capacity", "--example", "nope"],
        vec!["capacity", "--example", "pauli:0.5,0.5,0.5,0.5"],
        vec!["capacity"],
        vec!["eof", "--example", "bell", "--cut", "0,1"],
        vec!["gap-scan", "--grid-step", "0.2"],
    ] {
        let out = qcap(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = qcap(&["verify-paper", "--channel", &corrupt]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "checks ran before validation");
}

#[test]
fn infeasible_constraint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cost = write(
        dir.path(),
        "a.json",
        r#"{"dim": 2, "matrix": [[0,0],[0,0],[0,0],[1,0]]}"#,
    );
    let out = qcap(&[
        "capacity",
        "--example",
        "depol:2,1/3",
        "--constraint",
        &cost,
        "--alpha",
        "-0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let args = [
        "capacity",
        "--example",
        "depol:2,1/3",
        "--constraint",
        &cost,
        "--alpha",
        "1/4",
        "--restarts",
        "4",
    ];
    let out = json_of(&qcap(&args));
    let lam: f64 = 1.0 / 3.0;
    let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    let want = h((1.0 + lam * 0.5) / 2.0) - h((1.0 + lam) / 2.0);
    assert!((out["value_bits"].as_f64().unwrap() - want).abs() < 1e-6);
    assert_eq!(out["alpha"].as_f64(), Some(0.25));
}

#[test]
fn exported_channels_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "identity:2",
        "pauli:0.7,0.1,0.05,0.15",
        "depol:3,0.5",
        "vdc",
        "vdc:0.5",
        "antisym",
    ] {
        let path = dir.path().join("ch.json");
        let p = path.to_str().unwrap();
        assert!(qcap(&["export", "--example", name, "--out", p])
            .status
            .success());
        let a = qcap(&[
            "capacity",
            "--example",
            name,
            "--restarts",
            "2",
            "--seed",
            "3",
        ]);
        let b = qcap(&["capacity", "--channel", p, "--restarts", "2", "--seed", "3"]);
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
    let path = dir.path().join("st.json");
    let p = path.to_str().unwrap();
    assert!(
        qcap(&["export", "--example", "rho_T:1/2,1/6,1/6,1/6", "--out", p])
            .status
            .success()
    );
    let a = qcap(&[
        "eof",
        "--example",
        "rho_T:1/2,1/6,1/6,1/6",
        "--restarts",
        "2",
    ]);
    let b = qcap(&["eof", "--state", p, "--restarts", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gap_scan_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert!(qcap(&[
            "gap-scan",
            "--grid-step",
            "0.1",
            "--out",
            p.to_str().unwrap()
        ])
        .status
        .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = qcap(&["gap-scan", "--grid-step", "1/20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text
        .lines()
        .find(|l| l.starts_with("0.150000000,0.150000000,0.150000000,"))
        .unwrap();
    assert!(row.ends_with(",true,") || row.ends_with(",true"), "{row}");
    assert!(text.lines().any(|l| l.contains(",false,")));
}

#[test]
fn superadd_search_is_empty_and_deterministic() {
    let a = qcap(&["superadd-search", "--samples", "40", "--seed", "9"]);
    let b = qcap(&["superadd-search", "--samples", "40", "--seed", "9"]);
    assert_eq!(json_of(&a), Value::Array(vec![]));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_qcap"))
        .env("QCAP_THREADS", "1")
        .args(["capacity", "--example", "identity:2", "--restarts", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_qcap"))
        .env("QCAP_THREADS", "zero")
        .args(["capacity", "--example", "identity:2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_paper_quick() {
    let out = qcap(&["verify-paper", "--level", "quick"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        10,
        "{text}"
    );
    assert!(text.lines().any(|l| l.starts_with("SKIP [10]")));
}
