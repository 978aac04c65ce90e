//! End-to-end tests against the compiled binary: flag handling, CSV shape,
//! exit codes, and byte-level determinism. The shipped example configs under
//! `configs/` double as fixtures so they stay working.

#![cfg(feature = "cli")]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavescat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Non-comment lines after the column header row.
fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .collect()
}

fn write_temp_config(name: &str, text: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).expect("write temp config");
    path
}

#[test]
fn sweep_emits_one_hundred_monotone_rows() {
    let config = config_path("interval_sweep.cfg");
    let output = run(&["--config", config.to_str().unwrap(), "--command", "sweep"]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    assert!(csv.starts_with("# wavescat "), "missing version header");
    assert!(csv.contains("# command: sweep"));
    assert!(csv.contains("# config-hash: fnv1a64:"));
    assert!(csv.contains(
        "k,lambda,lambda_prime,re_S,im_S,abs_err_vs_reference,unitarity_defect,open_channel_count"
    ));
    assert!(
        !csv.contains("# skipped"),
        "no grid point sits on a threshold"
    );
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 100);
    let mut previous = f64::NEG_INFINITY;
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8, "row has 8 fields: {row}");
        let k: f64 = fields[0].parse().unwrap();
        assert!(k > previous, "k column not strictly increasing at {row}");
        previous = k;
        let err: f64 = fields[5]
            .parse()
            .expect("interval rows carry a reference error");
        // 17 retained modes put the first-order truncation error at a few
        // percent; anything above 0.1 would mean the reference is wrong.
        assert!(err < 0.1, "error vs exact phase too large: {row}");
    }
}

#[test]
fn output_file_reruns_are_byte_identical() {
    let config = config_path("rectangle_smatrix.cfg");
    let out_a = Path::new(env!("CARGO_TARGET_TMPDIR")).join("rect_a.csv");
    let out_b = Path::new(env!("CARGO_TARGET_TMPDIR")).join("rect_b.csv");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "--config",
            config.to_str().unwrap(),
            "--command",
            "smatrix",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
        assert!(
            stdout(&output).is_empty(),
            "--out runs write nothing to stdout"
        );
    }
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "reruns must be byte-identical");

    let seeded = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "smatrix",
        "--seed",
        "11",
    ]);
    assert!(seeded.status.success());
    assert!(
        stdout(&seeded).contains("# seed: 11"),
        "seed echoed in header"
    );
}

#[test]
fn smatrix_writes_the_full_open_block() {
    let config = config_path("rectangle_smatrix.cfg");
    let output = run(&["--config", config.to_str().unwrap(), "--command", "smatrix"]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 9, "3 open channels give a 3x3 block");
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        let open: usize = fields[7].parse().unwrap();
        assert_eq!(open, 3);
    }
}

#[test]
fn malformed_config_exits_two() {
    let config = write_temp_config("broken.cfg", "geometry.kind = example1d\nwibble\n");
    let output = run(&["--config", config.to_str().unwrap(), "--command", "sweep"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(
        err.contains("config line 2"),
        "error should carry the line number, got: {err}"
    );
}

#[test]
fn unknown_command_exits_two() {
    let config = config_path("interval_sweep.cfg");
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "frobnicate",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(
        err.contains("smatrix") && err.contains("compare-formulas"),
        "got: {err}"
    );
}

#[test]
fn missing_config_file_exits_two() {
    let output = run(&["--config", "/nonexistent/nowhere.cfg", "--command", "sweep"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn threshold_collision_exits_three() {
    // k = 1 on the rectangle sits exactly on the second channel threshold.
    let config = write_temp_config(
        "threshold.cfg",
        "geometry.kind = rect2d\nrun.k = 1.0\nrun.N = 400\nrun.Lambda = 12\n",
    );
    let output = run(&["--config", config.to_str().unwrap(), "--command", "smatrix"]);
    assert_eq!(output.status.code(), Some(3));
    assert!(
        stderr(&output).contains("threshold"),
        "got: {}",
        stderr(&output)
    );
}

#[test]
fn unitarity_defects_stay_small_through_the_binary() {
    let config = config_path("cavity_quick.cfg");
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "unitarity",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    assert!(csv.contains(
        "k,open_channel_count,unitarity_defect_projected,unitarity_defect_full,symmetry_defect_full"
    ));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3, "one row per grid wavenumber");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let projected: f64 = fields[2].parse().unwrap();
        assert!(
            projected <= 1e-10,
            "projected defect {projected:.3e} in {row}"
        );
    }
}

#[test]
fn compare_formulas_contrast_through_the_binary() {
    let config = config_path("cavity_quick.cfg");
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "compare-formulas",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let transpose_projected: f64 = fields[2].parse().unwrap();
        let conjugate_projected: f64 = fields[3].parse().unwrap();
        let conjugate_full: f64 = fields[5].parse().unwrap();
        assert!(
            conjugate_projected >= 1e3 * transpose_projected.max(1e-14),
            "projection contrast missing in {row}"
        );
        assert!(conjugate_full <= 1e-10, "full conjugate defect in {row}");
    }
}

#[test]
fn converge_commands_emit_fit_metadata() {
    let config = write_temp_config(
        "converge.cfg",
        "geometry.kind = example1d\nrun.k = 0.7\nrun.N = 16384\nrun.Lambda = 64\n",
    );
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "converge-n",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    assert_eq!(
        data_rows(&csv).len(),
        4,
        "5-rung ladder minus the reference"
    );
    assert!(csv.contains("# fit-coords:"));
    assert!(csv.contains("# fit-slope:"));

    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--command",
        "converge-lambda",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let csv = stdout(&output);
    assert!(csv.contains("# reference:"));
    assert_eq!(data_rows(&csv).len(), 4);
}
