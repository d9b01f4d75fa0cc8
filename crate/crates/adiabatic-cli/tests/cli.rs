//! End-to-end tests of the `adiabatic` binary: flag handling, exit codes,
//! output formats, and determinism.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adiabatic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Parse CSV text into one map per data row.
fn csv_rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header line").split(',').collect();
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), header.len(), "ragged row: {line}");
            header.iter().map(|h| h.to_string()).zip(cells.iter().map(|c| c.to_string())).collect()
        })
        .collect()
}

fn cell_f64(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("column {key} not numeric: {:?}", row[key]))
}

fn temp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("adiabatic-cli-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn cancel_prints_the_first_three_cancellation_times() {
    let out = run(&["cancel", "--model", "search", "--N", "4", "--n", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    let expected = [9.1049242603637186, 18.209848520727437, 27.314772781091156];
    for (row, want) in rows.iter().zip(expected) {
        assert!((cell_f64(row, "T") - want).abs() <= 1e-6, "T = {}", row["T"]);
    }
}

#[test]
fn cancel_needs_matching_endpoint_structure() {
    // The two-level ramp has unequal endpoint gaps, so no cancellation
    // pattern is predicted: a numerical-domain failure, exit code 2.
    let out = run(&["cancel", "--model", "toy"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("not applicable"), "{}", stderr(&out));
}

#[test]
fn phases_align_at_small_t_and_disperse_at_large_t() {
    let aligned = run(&["phases", "--T", "0.01", "--count", "21"]);
    assert!(aligned.status.success(), "{}", stderr(&aligned));
    let rows = csv_rows(&stdout(&aligned));
    assert_eq!(rows.len(), 21);
    let sum = |rows: &[HashMap<String, String>]| -> (f64, f64) {
        rows.iter().fold((0.0, 0.0), |(re, im), row| {
            (re + cell_f64(row, "re"), im + cell_f64(row, "im"))
        })
    };
    let (re, im) = sum(&rows);
    assert!(re.hypot(im) >= 20.9, "|sum| = {}", re.hypot(im));

    let dispersed = run(&["phases", "--T", "4", "--count", "21"]);
    let rows = csv_rows(&stdout(&dispersed));
    let (re, im) = sum(&rows);
    assert!(re.hypot(im) <= 0.5 * 21.0, "|sum| = {}", re.hypot(im));
    // Phasors live on the unit circle.
    for row in &rows {
        let mag = cell_f64(row, "re").hypot(cell_f64(row, "im"));
        assert!((mag - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn phases_rejects_degenerate_requests() {
    let out = run(&["phases", "--T", "1", "--count", "1"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn simulate_at_t_zero_reports_the_projection_error() {
    let out = run(&["simulate", "--model", "search", "--N", "4", "--T", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let err = cell_f64(&rows[0], "error_exact");
    assert!((err - 0.75f64.sqrt()).abs() <= 1e-12, "error = {err}");
    assert_eq!(rows[0]["status"], "ok");
    // Bound columns were not requested.
    assert_eq!(rows[0]["upper"], "");
}

#[test]
fn sweep_row_brackets_the_error_and_round_trips_losslessly() {
    let out = run(&["sweep", "--model", "search", "--N", "4", "--T", "20"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    let (err, lower, upper) = (
        cell_f64(row, "error_exact"),
        cell_f64(row, "lower"),
        cell_f64(row, "upper"),
    );
    assert!(lower <= err && err <= upper, "{lower} <= {err} <= {upper}");
    assert!(cell_f64(row, "first_order_norm") > 0.0);
    assert!(cell_f64(row, "jrs") > 0.0);
    // Every numeric cell re-serialises to the identical 17-digit string.
    for (key, value) in row {
        if !value.is_empty() && key != "status" && key != "L_used" {
            let reparsed: f64 = value.parse().unwrap();
            assert_eq!(&format!("{reparsed:.16e}"), value, "lossy column {key}");
        }
    }
}

#[test]
fn log_range_fills_decades() {
    let out = run(&[
        "bounds", "--model", "search", "--N", "4", "--t-min", "10", "--t-max", "1000",
        "--points", "3", "--outputs", "first_order",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let ts: Vec<f64> = rows.iter().map(|r| cell_f64(r, "T")).collect();
    assert_eq!(ts.len(), 3);
    assert!((ts[0] - 10.0).abs() <= 1e-12);
    assert!((ts[1] - 100.0).abs() <= 1e-9);
    assert!((ts[2] - 1000.0).abs() <= 1e-12);
}

#[test]
fn identical_invocations_write_identical_files() {
    let path_a = temp_path("det-a.csv");
    let path_b = temp_path("det-b.csv");
    for path in [&path_a, &path_b] {
        let out = run(&[
            "bounds", "--model", "search", "--N", "4", "--T", "20,40", "--jobs", "2",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read(&path_a).expect("first file");
    let b = std::fs::read(&path_b).expect("second file");
    assert!(!a.is_empty() && a == b, "outputs differ");
    let _ = std::fs::remove_file(&path_a);
    let _ = std::fs::remove_file(&path_b);
}

#[test]
fn json_output_parses_and_matches_csv_values() {
    let csv = run(&["bounds", "--model", "search", "--N", "2", "--T", "30"]);
    let json = run(&["bounds", "--model", "search", "--N", "2", "--T", "30", "--format", "json"]);
    assert!(csv.status.success() && json.status.success());
    let rows = csv_rows(&stdout(&csv));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid JSON");
    let records = parsed.as_array().expect("array of records");
    assert_eq!(records.len(), 1);
    let upper_json = records[0]["upper"].as_f64().expect("numeric upper");
    assert_eq!(upper_json.to_bits(), cell_f64(&rows[0], "upper").to_bits());
    assert!(records[0]["error_exact"].is_null());
    assert_eq!(records[0]["status"], "ok");
}

#[test]
fn config_file_drives_a_sweep_and_flags_override_it() {
    let config_path = temp_path("sweep.json");
    std::fs::write(
        &config_path,
        r#"{"model":{"model":"marzlin_sanders","omega0":1.0,"softening":1.0},
            "T":[50],"outputs":["error"],"rel_tol":0.01}"#,
    )
    .expect("write config");
    let out = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    // The resonant member keeps an order-one error even at T = 50.
    assert!(cell_f64(&rows[0], "error_exact") > 0.1);

    // An inline flag overrides the configured T list.
    let out = run(&[
        "simulate", "--config", config_path.to_str().unwrap(), "--T", "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert!((cell_f64(&rows[0], "T") - 0.5).abs() <= 1e-15);
    let _ = std::fs::remove_file(&config_path);
}

#[test]
fn validation_errors_exit_1_and_list_every_violation() {
    let config_path = temp_path("bad.json");
    std::fs::write(
        &config_path,
        r#"{"model":{"model":"search","N":4},"T":[-5],"rel_tol":0.9}"#,
    )
    .expect("write config");
    let out = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("positive"), "{msg}");
    assert!(msg.contains("rel_tol"), "{msg}");
    let _ = std::fs::remove_file(&config_path);
}

#[test]
fn malformed_json_exits_1_with_position() {
    let config_path = temp_path("broken.json");
    std::fs::write(&config_path, "{\"model\": }").expect("write config");
    let out = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("column"), "{}", stderr(&out));
    let _ = std::fs::remove_file(&config_path);
}

#[test]
fn bad_flags_exit_1_while_help_exits_0() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sweep"));
    let sub_help = run(&["sweep", "--help"]);
    assert_eq!(sub_help.status.code(), Some(0));
    assert!(stdout(&sub_help).contains("--rel-tol"));

    let unknown = run(&["sweep", "--model", "search", "--T", "10", "--frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
    let missing_model = run(&["simulate", "--T", "1"]);
    assert_eq!(missing_model.status.code(), Some(1));
    let bad_rel_tol = run(&["simulate", "--model", "search", "--T", "1", "--rel-tol", "0.9"]);
    assert_eq!(bad_rel_tol.status.code(), Some(1));
}

#[test]
fn pathcheck_residuals_halve_per_grid_doubling() {
    let out = run(&["pathcheck", "--model", "search", "--N", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 9, "3 paths x 3 grids");
    for triple in rows.chunks(3) {
        let r: Vec<f64> = triple.iter().map(|row| cell_f64(row, "normalized_residual")).collect();
        for pair in r.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
        }
    }
    // A custom path off the step grid is a parameter error (exit 1).
    let off_grid = run(&[
        "pathcheck", "--model", "search", "--N", "4", "--labels", "0,1", "--times", "0,0.3",
        "--L", "1024",
    ]);
    assert_eq!(off_grid.status.code(), Some(1), "{}", stderr(&off_grid));
}
