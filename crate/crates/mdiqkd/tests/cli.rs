//! End-to-end checks of the command-line surface: subcommands, exit codes,
//! and output files.

use std::path::Path;
use std::process::{Command, Output};

fn mdiqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdiqkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_table(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const QUICK: &[&str] = &["--coarse-resolution", "10", "--refinement-rounds", "1"];

#[test]
fn eval_reports_noiseless_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(
        dir.path(),
        "noiseless.json",
        r#"{"p": [[0.5, 0.0, 0.25], [0.0, 0.5, 0.25], [0.25, 0.25, 0.0]]}"#,
    );
    let out = mdiqkd(&["eval", "--table", &table]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["e_bit"], 0.0);
    assert!((report["key_rate_improved"]["rate"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(report["coefficient_floor"].as_f64().unwrap(), 1e-6);
}

#[test]
fn eval_rejects_out_of_range_entry() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(
        dir.path(),
        "bad.json",
        r#"{"p": [[1.5, 0.0, 0.25], [0.0, 0.5, 0.25], [0.25, 0.25, 0.0]]}"#,
    );
    let out = mdiqkd(&["eval", "--table", &table]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p00"));
}

#[test]
fn eval_rejects_malformed_document() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), "malformed.json", "{\"p\": [[0.5]]}");
    let out = mdiqkd(&["eval", "--table", &table]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mdiqkd(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        mdiqkd(&["sweep-depolarizing", "--no-such-flag"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(mdiqkd(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_two() {
    let out = mdiqkd(&[
        "sweep-depolarizing",
        "--min",
        "0.0",
        "--max",
        "0.6",
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let mut args = vec![
        "sweep-depolarizing",
        "--min",
        "0.0",
        "--max",
        "0.02",
        "--steps",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ];
    args.extend_from_slice(QUICK);
    let out = mdiqkd(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4); // header + 3 rows
    assert!(lines[0].starts_with("x_value,e_bit,e_phase_original"));
    assert_eq!(lines[0].split(',').count(), 14);
}

#[test]
fn sweeps_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let csv = dir.path().join(format!("w{workers}.csv"));
        let mut args = vec![
            "sweep-darkcount",
            "--min-db",
            "0",
            "--max-db",
            "20",
            "--steps",
            "5",
            "--workers",
            workers,
            "--out",
            csv.to_str().unwrap(),
        ];
        args.extend_from_slice(QUICK);
        let out = mdiqkd(&args);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn oracle_check_scenario_is_sound() {
    let mut args = vec![
        "oracle-check",
        "--scenario",
        "depolarizing",
        "--x",
        "0.02",
        "--resolution",
        "24",
    ];
    args.extend_from_slice(QUICK);
    let out = mdiqkd(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("original"), "stdout: {text}");
    assert!(text.contains("sound"));
}

#[test]
fn dense_oracle_switch_runs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("oracle.csv");
    let out = mdiqkd(&[
        "sweep-depolarizing",
        "--min",
        "0.01",
        "--max",
        "0.02",
        "--steps",
        "2",
        "--dense-oracle",
        "15",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}
