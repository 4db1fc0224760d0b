//! Binary-level tests: exit codes, artifact layout, config handling.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseplate"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary launches")
}

fn read_json(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// Small solver setup: 256 cells, ~0.7 s per pass.
const SMALL_SOLVER: &str = "\
grid_nx = 256
grid_ny = 256
time_step_iu = 0.0207
step_count = 650
packet_center_x_iu = -10.5
packet_sigma_x_iu = 2.9
solenoid_x_iu = 3.0
shield_radius_iu = 1.0
screen_x_iu = 14.0
";

#[test]
fn phase_defaults_succeed_and_emit_artifacts() {
    let dir = tempdir().unwrap();
    let out = run_in(dir.path(), &["phase", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(dir.path(), "summary.json");
    let dphi = v["delta_phi_rad"].as_f64().unwrap();
    assert!((dphi - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    assert!(dir.path().join("effective_config.txt").exists());
}

#[test]
fn unknown_key_is_a_config_error_with_line_info() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "voltagee = 10 kV\n");
    let out = run_in(dir.path(), &["phase", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1") && err.contains("voltagee"), "{err}");
}

#[test]
fn missing_unit_is_a_config_error() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "# comment\nvoltage = 10\n");
    let out = run_in(dir.path(), &["phase", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("unit"), "{err}");
}

#[test]
fn unreadable_config_is_an_io_error() {
    let dir = tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    let out = run_in(dir.path(), &["phase", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn out_dir_collision_is_an_io_error() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("not_a_dir");
    std::fs::write(&file, "x").unwrap();
    let out = run_in(&file, &["phase"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let out = run_in(dir.path(), &["phase", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn loop_summary_has_exactly_the_documented_keys() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "loop.cfg",
        "loop_radius = 20 um\nflux = 0.5 flux_quantum\ngauge = string-offset\n",
    );
    let out = run_in(dir.path(), &["loop", "--quiet", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(dir.path(), "summary.json");
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["flux_Wb", "gauge", "phase_rad", "winding_number"]);
    assert_eq!(v["winding_number"], 1);
    assert_eq!(v["gauge"], "string-offset");
    // Half a flux quantum encircled once: half a turn of phase.
    let phase = v["phase_rad"].as_f64().unwrap();
    assert!((phase - std::f64::consts::PI).abs() < 1e-6, "{phase}");
}

#[test]
fn non_enclosing_loop_reports_zero_winding_and_phase() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "loop.cfg",
        "loop_radius = 4 um\nloop_center_x = 30 um\n",
    );
    let out = run_in(dir.path(), &["loop", "--quiet", "--config", &cfg]);
    assert!(out.status.success());
    let v = read_json(dir.path(), "summary.json");
    assert_eq!(v["winding_number"], 0);
    assert!(v["phase_rad"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn fringes_writes_parsable_patterns_matching_the_prediction() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.cfg", "flux = 0.3 flux_quantum\n");
    let out = run_in(dir.path(), &["fringes", "--quiet", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (y, i) = phaseplate::cli::parse_pattern_csv(&dir.path().join("pattern.csv")).unwrap();
    assert_eq!(y.len(), 2049);
    assert_eq!(i.len(), 2049);
    assert!(dir.path().join("reference.csv").exists());
    let v = read_json(dir.path(), "summary.json");
    let measured = v["measured_shift_m"].as_f64().unwrap();
    let predicted = v["predicted_shift_m"].as_f64().unwrap();
    let lam = v["fringe_spacing_m"].as_f64().unwrap();
    assert!((measured - predicted).abs() < 0.01 * lam);
}

#[test]
fn effective_config_reruns_to_the_same_effective_config() {
    let first = tempdir().unwrap();
    let second = tempdir().unwrap();
    let cfg = write_config(
        first.path(),
        "odd.cfg",
        "voltage = 12.345 kV\nflux = 0.37 flux_quantum\nloop_radius = 17 um\nstring_angles = 171 193 deg\n",
    );
    let out = run_in(first.path(), &["phase", "--quiet", "--config", &cfg]);
    assert!(out.status.success());
    let effective = first.path().join("effective_config.txt");
    let out = run_in(
        second.path(),
        &["phase", "--quiet", "--config", effective.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read(&effective).unwrap();
    let b = std::fs::read(second.path().join("effective_config.txt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulate_small_grid_shifts_a_quarter_fringe() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.cfg",
        &format!("{SMALL_SOLVER}alpha = 0.25\ncheckpoint_every = 300\n"),
    );
    let out = run_in(dir.path(), &["simulate", "--quiet", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty(), "--quiet must silence progress");
    let v = read_json(dir.path(), "summary.json");
    let shift = v["shift_fringes"].as_f64().unwrap();
    assert!((shift - 0.25).abs() < 0.05, "{shift}");
    // Positions in the CSV are in meters via the de Broglie anchor.
    let scale = v["length_scale_m_per_iu"].as_f64().unwrap();
    assert!(scale > 1e-13 && scale < 1e-10, "{scale}");
    let (y, _) = phaseplate::cli::parse_pattern_csv(&dir.path().join("pattern.csv")).unwrap();
    let span = y.last().unwrap() - y.first().unwrap();
    assert!(span < 67.0 * scale * 1.01);
    for name in ["checkpoint_00300.csv", "checkpoint_00600.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    assert!(!dir.path().join("checkpoint_00900.csv").exists());
}

#[test]
fn simulate_progress_lands_on_stderr_without_quiet() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.cfg",
        &format!("{SMALL_SOLVER}alpha = 0\n"),
    );
    let out = run_in(dir.path(), &["simulate", "--config", &cfg]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("solver"), "{err}");
    // Zero flux: the run doubles as its own reference.
    let v = read_json(dir.path(), "summary.json");
    assert_eq!(v["shift_fringes"].as_f64().unwrap(), 0.0);
}

#[test]
fn truncated_simulation_exits_incomplete() {
    let dir = tempdir().unwrap();
    let text = SMALL_SOLVER.replace("step_count = 650", "step_count = 60");
    let cfg = write_config(dir.path(), "sim.cfg", &text);
    let out = run_in(dir.path(), &["simulate", "--quiet", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unstable_time_step_is_a_config_error() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.cfg", "time_step_iu = 10.0\n");
    let out = run_in(dir.path(), &["simulate", "--quiet", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauge_check_reports_angle_stable_shifts() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gc.cfg",
        &format!("{SMALL_SOLVER}alpha = 0.25\nstring_angles = 180 176 184 deg\n"),
    );
    let out = run_in(dir.path(), &["gauge-check", "--quiet", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(dir.path(), "summary.json");
    assert_eq!(v["angles_rad"].as_array().unwrap().len(), 3);
    let max_change = v["max_change_fringes"].as_f64().unwrap();
    assert!(max_change < 0.005, "{max_change}");
}

#[test]
fn accept_refuses_a_config_file() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "x.cfg", "voltage = 10 kV\n");
    let out = run_in(dir.path(), &["accept", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}
