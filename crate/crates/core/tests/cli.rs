//! The `exprgg` binary: outputs, exit codes and determinism.

use std::process::{Command, Output};

fn exprgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exprgg"))
        .args(args)
        .output()
        .expect("run exprgg")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows of the CSV section named `name` in multi-table stdout.
fn section(text: &str, name: &str) -> Vec<Vec<String>> {
    let marker = format!("# {name}");
    let body = match text.split_once(&marker) {
        Some((_, rest)) => rest.split("\n# ").next().unwrap(),
        None => text,
    };
    body.lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn chain_matrix_rows_sum_to_one() {
    let out = exprgg(&[
        "chain", "--n", "5", "--p", "0.5", "--lambda", "1", "--r", "1",
    ]);
    assert!(out.status.success());
    let rows = section(&stdout(&out), "chain_matrix");
    assert_eq!(rows[0], ["from", "to_connected", "to_disconnected"]);
    for row in &rows[1..] {
        let a: f64 = row[1].parse().unwrap();
        let b: f64 = row[2].parse().unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}

#[test]
fn chain_limit_column_decreases() {
    let out = exprgg(&["chain", "--limit", "--n-grid", "2,5,10,20,50"]);
    assert!(out.status.success());
    let rows = section(&stdout(&out), "chain_limit");
    let pi1: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(pi1.len(), 5);
    assert!(pi1.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn hitting_without_memory_is_geometric() {
    let out = exprgg(&[
        "hitting", "--n", "4", "--p", "0", "--k-max", "6", "--oracle",
    ]);
    assert!(out.status.success());
    let rows = section(&stdout(&out), "hitting_tail");
    assert_eq!(rows[0], ["k", "recursion", "markov", "oracle"]);
    let t1: f64 = rows[2][1].parse().unwrap();
    for (k, row) in rows[1..].iter().enumerate() {
        let [rec, markov, ora] = [1, 2, 3].map(|c| row[c].parse::<f64>().unwrap());
        assert!((rec - t1.powi(k as i32)).abs() < 1e-12);
        assert!((rec - markov).abs() < 1e-12);
        assert!((rec - ora).abs() < 1e-9);
    }
}

#[test]
fn hitting_bracket_is_tight_for_short_cutoff() {
    let out = exprgg(&["hitting", "--n", "3", "--r", "0.5", "--k-max", "12"]);
    let rows = section(&stdout(&out), "hitting_mean");
    let lo: f64 = rows[1][1].parse().unwrap();
    let hi: f64 = rows[1][2].parse().unwrap();
    assert!(hi - lo < 1e-6 && hi >= lo);
}

#[test]
fn exit_codes() {
    assert_eq!(exprgg(&["hitting", "--k-max", "25"]).status.code(), Some(1));
    assert_eq!(exprgg(&["nonsense"]).status.code(), Some(1));
    assert_eq!(exprgg(&["chain", "--p", "1.5"]).status.code(), Some(1));
    assert_eq!(exprgg(&["--help"]).status.code(), Some(0));
    let hetero = exprgg(&[
        "snapshot", "degree", "--n", "20", "--lambda", "10:1,*:2", "--i", "3",
    ]);
    assert_eq!(hetero.status.code(), Some(1));
    // certain disconnection leaves the two-state chain undefined
    assert_eq!(exprgg(&["chain", "--r", "1e-300"]).status.code(), Some(2));
}

#[test]
fn degree_pmf_sums_to_one() {
    let out = exprgg(&["snapshot", "degree", "--n", "50", "--i", "25"]);
    assert!(out.status.success());
    let rows = section(&stdout(&out), "degree");
    assert_eq!(rows[0], ["k", "closed_form", "class", "exact"]);
    let total: f64 = rows[1..].iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn figure2_columns_decay_to_zero() {
    let out = exprgg(&[
        "snapshot", "figure2", "--r", "1", "--n-grid", "12..60", "--k", "1,2,3,4",
    ]);
    assert!(out.status.success());
    let rows = section(&stdout(&out), "figure2");
    assert_eq!(rows[0], ["n", "psi_1", "psi_2", "psi_3", "psi_4"]);
    assert_eq!(rows.len(), 50);
    let last = &rows[49];
    assert_eq!(last[0], "60");
    for cell in &last[1..] {
        assert!(cell.parse::<f64>().unwrap() < 1e-2);
    }
}

#[test]
fn json_reports_and_files() {
    let dir = std::env::temp_dir().join(format!("exprgg-cli-{}", std::process::id()));
    let out = exprgg(&[
        "snapshot",
        "summary",
        "--n",
        "6",
        "--mc",
        "2e4",
        "--format",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("snapshot_mc.json")).unwrap();
    let reports: serde_json::Value = serde_json::from_str(&text).unwrap();
    let first = &reports[0];
    for key in ["quantity", "value", "se", "target", "z"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(dir.join("snapshot_components.json").exists());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["simulate", "--n", "8", "--steps", "200", "--seed", "11"];
    assert_eq!(exprgg(&args).stdout, exprgg(&args).stdout);
    let args = [
        "hitting",
        "--n",
        "3",
        "--k-max",
        "4",
        "--mc",
        "3e4",
        "--seed",
        "5",
        "--workers",
        "2",
    ];
    assert_eq!(exprgg(&args).stdout, exprgg(&args).stdout);
    let args = ["verify", "--only", "1,2,3,9", "--seed", "9"];
    let (a, b) = (exprgg(&args), exprgg(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_reports_json_and_fails_with_code_3() {
    let ok = exprgg(&["verify", "--only", "2,3"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 2);
    // the normalized nearest-neighbour ratio sits near 1/2 at n = 1e5
    let failing = exprgg(&["verify", "--only", "10"]);
    assert_eq!(failing.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&failing.stderr).contains("criterion 10 FAIL"));
}

#[test]
fn simulate_writes_one_row_per_step() {
    let out = exprgg(&["simulate", "--n", "5", "--steps", "20"]);
    let rows = section(&stdout(&out), "trajectory");
    assert_eq!(rows[0], ["t", "connected", "components", "c", "b"]);
    assert_eq!(rows.len(), 22);
    for row in &rows[1..] {
        let k: usize = row[2].parse().unwrap();
        assert_eq!(row[1] == "true", k == 1);
        let c: f64 = row[3].parse().unwrap();
        let b: f64 = row[4].parse().unwrap();
        assert!(b <= c);
    }
}
