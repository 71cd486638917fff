use std::path::Path;
use std::process::{Command, Output};

fn semiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn dft_run_prints_csv() {
    let out = semiq(&["dft-run", "--n", "4", "--nq", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("state_prep_units"), "64");
    assert_eq!(col("quantum_gate_units"), "16");
    assert_eq!(col("classical_ops"), "32");
    assert!(col("deviation").parse::<f64>().unwrap() < 1e-9);
}

#[test]
fn sweep_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, json, svg) = (
        path(dir.path(), "s.csv"),
        path(dir.path(), "s.json"),
        path(dir.path(), "s.svg"),
    );
    let out = semiq(&[
        "search-sweep",
        "--n",
        "10",
        "--nq",
        "0..10",
        "--solutions",
        "1",
        "--seed",
        "7",
        "--csv",
        &csv,
        "--json",
        &json,
        "--svg",
        &svg,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 12);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["points"].as_array().unwrap().len(), 11);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn dft_sweep_chart_has_three_forecast_curves() {
    let dir = tempfile::tempdir().unwrap();
    let svg = path(dir.path(), "d.svg");
    let out = semiq(&["dft-sweep", "--n", "10", "--svg", &svg]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches(r#"class="forecast""#).count(), 3);
    for term in ["prep", "qft", "classical"] {
        assert!(text.contains(&format!(r#"data-term="{term}""#)));
    }
    assert!(text.contains(r#"class="measured""#));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let (csv, json) = (
            path(dir.path(), &format!("{run}.csv")),
            path(dir.path(), &format!("{run}.json")),
        );
        let out = semiq(&[
            "dft-sweep",
            "--n",
            "6",
            "--mode",
            "sampled",
            "--shots",
            "500",
            "--signal",
            "random",
            "--seed",
            "3",
            "--csv",
            &csv,
            "--json",
            &json,
        ]);
        assert_eq!(out.status.code(), Some(0));
        files.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn input_file_and_padding() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "x.txt");
    std::fs::write(&input, "1\n2\n3\n").unwrap();
    let out = semiq(&["dft-run", "--nq", "1", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pad"));
    let out = semiq(&["dft-run", "--nq", "2", "--input", &input, "--pad"]);
    assert_eq!(out.status.code(), Some(0));

    std::fs::write(&input, "1\nx\n").unwrap();
    let out = semiq(&["dft-run", "--nq", "1", "--input", &input]);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn exit_codes() {
    assert_eq!(semiq(&["verify", "--n", "4"]).status.code(), Some(0));
    let out = semiq(&["dft-run", "--n", "4", "--nq", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--nq"));
    assert_eq!(semiq(&["frobnicate"]).status.code(), Some(2));
    let missing = semiq(&["dft-run", "--nq", "1", "--input", "/nonexistent/signal.txt"]);
    assert_eq!(missing.status.code(), Some(4));
    let unwritable = semiq(&[
        "dft-run",
        "--n",
        "2",
        "--nq",
        "1",
        "--csv",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(unwritable.status.code(), Some(4));
    assert_eq!(semiq(&["--help"]).status.code(), Some(0));
}
