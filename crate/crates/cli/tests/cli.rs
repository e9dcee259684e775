use std::path::Path;
use std::process::{Command, Output};

fn tractlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tractlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows as split fields, skipping comment lines and the header.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn eigen_euler_r0() {
    let out = tractlab(&["eigen", "--process", "euler", "--r", "0", "--count", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("#schema=tractlab.v1.eigen\n"));
    let vals: Vec<f64> = rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    let pi = std::f64::consts::PI;
    for (j, v) in vals.iter().enumerate() {
        let exact = (pi * (j as f64 + 0.5)).powi(-2);
        assert!((v / exact - 1.0).abs() < 1e-15);
    }
    assert_eq!(vals.len(), 3);
    assert!(
        (vals[0] - 0.405285).abs() < 5e-7
            && (vals[1] - 0.0450316).abs() < 5e-8
            && (vals[2] - 0.0162114).abs() < 5e-8
    );
}

#[test]
fn complexity_example() {
    let out = tractlab(&[
        "complexity",
        "--process",
        "euler",
        "--seq",
        "const:0",
        "--d",
        "1",
        "--eps",
        "0.5",
    ]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][2], "1");
    assert_eq!(r[0][4], "true");
}

#[test]
fn scan_wiener_half_is_quasi_polynomial() {
    let out = tractlab(&[
        "scan",
        "--process",
        "wiener",
        "--seq",
        "power-wiener:s=0.5",
        "--notion",
        "qpt",
        "--dmax",
        "1e6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("#verdict notion=qpt verdict=EvidenceFor"),
        "{text}"
    );
    assert!(!text.contains("#verdict notion=spt"));
}

#[test]
fn scan_json_keeps_large_grid_points_exact() {
    let out = tractlab(&[
        "scan",
        "--process",
        "euler",
        "--seq",
        "const:3",
        "--dmax",
        "1e25",
        "--grid",
        "1",
        "--format",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(
        text.contains("10000000000000000000000000]"),
        "{}",
        &text[..400.min(text.len())]
    );
}

#[test]
fn invalid_config_exits_2() {
    for args in [
        &["eigen", "--process", "euler", "--r", "0", "--bogus"][..],
        &["eigen", "--process", "heat", "--r", "0"],
        &[
            "complexity",
            "--process",
            "euler",
            "--seq",
            "nope",
            "--d",
            "1",
            "--eps",
            "0.5",
        ],
        &[
            "complexity",
            "--process",
            "euler",
            "--seq",
            "const:0",
            "--d",
            "1",
            "--eps",
            "1.5",
        ],
        &[
            "scan",
            "--process",
            "euler",
            "--seq",
            "const:0",
            "--dmax",
            "1e31",
        ],
        &["simulate", "--r", "1", "--samples", "0"],
    ] {
        let out = tractlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_tractlab"))
        .args(["eigen", "--process", "euler", "--r", "0"])
        .env("TRACTLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_3() {
    let out = tractlab(&[
        "complexity",
        "--process",
        "euler",
        "--seq",
        "const:0",
        "--d",
        "3",
        "--eps",
        "0.01",
        "--budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let p = path.to_str().unwrap();
    let out = tractlab(&[
        "complexity",
        "--process",
        "euler",
        "--seq",
        "const:0",
        "--d",
        "3",
        "--eps",
        "0.01",
        "--budget",
        "10",
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
    let out = tractlab(&[
        "kernel",
        "--process",
        "wiener",
        "--r",
        "1",
        "--grid",
        "3",
        "--out",
        p,
    ]);
    assert!(out.status.success());
    assert_eq!(rows(&std::fs::read_to_string(&path).unwrap()).len(), 9);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

fn run_to(path: &Path, args: &[&str]) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    assert!(tractlab(&full).status.success());
    std::fs::read(path).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report");
    for args in [
        &[
            "simulate",
            "--r",
            "2",
            "--grid",
            "8",
            "--samples",
            "50",
            "--seed",
            "42",
        ][..],
        &[
            "eigen",
            "--process",
            "wiener",
            "--r",
            "1",
            "--count",
            "5",
            "--format",
            "json",
        ],
        &[
            "scan",
            "--process",
            "euler",
            "--seq",
            "log-threshold",
            "--dmax",
            "1e5",
            "--delta",
            "0.25",
        ],
    ] {
        let a = run_to(&path, args);
        let b = run_to(&path, args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn simulate_changes_with_seed() {
    let a = stdout(&tractlab(&[
        "simulate",
        "--r",
        "0",
        "--grid",
        "4",
        "--samples",
        "2",
        "--seed",
        "1",
    ]));
    let b = stdout(&tractlab(&[
        "simulate",
        "--r",
        "0",
        "--grid",
        "4",
        "--samples",
        "2",
        "--seed",
        "2",
    ]));
    assert_ne!(rows(&a), rows(&b));
    assert_eq!(rows(&a).len(), 8);
}
