//! Command-line front end.
//!
//! Each subcommand reads an optional key = value configuration, performs one
//! experiment kind, and writes its artifacts into `--out`: always a
//! `summary.json` and the fully resolved `effective_config.txt`, plus CSV
//! patterns where the kind produces any. Exit codes: 0 success, 2 bad
//! configuration or arguments, 3 numerical-contract violation (including
//! failed acceptance criteria), 4 incomplete run, 5 i/o failure.

pub mod config;
mod output;

pub use config::{ExperimentConfig, GaugeChoice, Kind, LoopShape};
pub use output::parse_pattern_csv;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::acceptance;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::fields::{Gauge, SolenoidSpec};
use crate::fringes::{
    extract_fringe_shift, fringe_shift_prediction, two_slit_pattern, FringePattern, SlitGeometry,
};
use crate::geom::{Direction, Vec2};
use crate::phase::{
    ab_phase_loop, phase_plate_delta_phi, phase_plate_model, ElectronState, PolylinePath,
};
use crate::schrodinger::{
    arrival_time_delay, run_experiment_observed, ApparatusMask, ArrivalRecord,
};

#[derive(Parser, Debug)]
#[command(
    name = "phaseplate",
    version,
    about = "Electron fringe displacement from enclosed magnetic flux"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file of key = value lines; defaults fill missing keys.
    #[arg(long, global = true, value_name = "path")]
    pub config: Option<PathBuf>,
    /// Directory for emitted artifacts (created if missing).
    #[arg(long, global = true, default_value = ".", value_name = "dir")]
    pub out: PathBuf,
    /// Reserved for stochastic extensions; recorded in the summary.
    #[arg(long, global = true, value_name = "int")]
    pub seed: Option<u64>,
    /// Suppress progress lines on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form arm phases and the refractive plate numbers.
    Phase,
    /// Loop integral of the vector potential along a closed path.
    Loop,
    /// Synthesized double-slit pattern with and without enclosed flux.
    Fringes,
    /// Propagate a wavepacket through the slit apparatus.
    Simulate,
    /// Measure the shift at several gauge-string angles.
    GaugeCheck,
    /// Measure the shift at three beam momenta.
    DispersionCheck,
    /// Run the whole verification suite.
    Accept,
}

impl Command {
    fn kind(&self) -> Option<Kind> {
        match self {
            Command::Phase => Some(Kind::Phase),
            Command::Loop => Some(Kind::Loop),
            Command::Fringes => Some(Kind::Fringes),
            Command::Simulate => Some(Kind::Simulate),
            Command::GaugeCheck => Some(Kind::GaugeCheck),
            Command::DispersionCheck => Some(Kind::DispersionCheck),
            Command::Accept => None,
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::Io {
        path: cli.out.clone(),
        source: e,
    })?;
    let Some(kind) = cli.command.kind() else {
        return run_accept(cli);
    };
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => String::new(),
    };
    let cfg = ExperimentConfig::parse(kind, &text)?;
    output::atomic_write(
        &cli.out.join("effective_config.txt"),
        cfg.effective_text().as_bytes(),
    )?;
    let mut summary = match kind {
        Kind::Phase => run_phase(&cfg)?,
        Kind::Loop => run_loop(&cfg)?,
        Kind::Fringes => run_fringes(cli, &cfg)?,
        Kind::Simulate => run_simulate(cli, &cfg)?,
        Kind::GaugeCheck => run_gauge_check(cli, &cfg)?,
        Kind::DispersionCheck => run_dispersion_check(cli, &cfg)?,
    };
    if let Some(seed) = cli.seed {
        summary["seed"] = json!(seed);
    }
    output::emit_summary(&summary, &cli.out.join("summary.json"))?;
    Ok(())
}

fn progress(cli: &Cli, message: &str) {
    if !cli.quiet {
        eprintln!("{message}");
    }
}

fn beam(cfg: &ExperimentConfig) -> Result<ElectronState> {
    ElectronState::from_voltage(PhysicalConstants::electron(), cfg.voltage_v)
}

/// Flux actually applied: an explicit `alpha` key overrides the `flux` key.
fn effective_flux(cfg: &ExperimentConfig) -> f64 {
    cfg.resolved_alpha() * PhysicalConstants::electron().flux_quantum
}

fn solenoid(cfg: &ExperimentConfig) -> Result<SolenoidSpec> {
    SolenoidSpec::new(
        Vec2::new(0.0, 0.0),
        cfg.solenoid_radius_m,
        effective_flux(cfg),
    )
}

fn gauge(cfg: &ExperimentConfig) -> Gauge {
    match cfg.gauge {
        GaugeChoice::Symmetric => Gauge::Symmetric,
        GaugeChoice::StringOffset => Gauge::StringOffset {
            string_direction: Direction::from_angle(cfg.string_angle_rad),
        },
    }
}

fn slit_geometry(cfg: &ExperimentConfig) -> Result<SlitGeometry> {
    SlitGeometry::new(
        cfg.slit_spacing_m,
        cfg.slit_width_m,
        cfg.screen_distance_m,
        cfg.screen_half_extent_m,
        cfg.screen_samples,
    )
}

fn run_phase(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let state = beam(cfg)?;
    let spec = solenoid(cfg)?;
    let model = phase_plate_model(&state, &spec);
    let delta_phi = phase_plate_delta_phi(&state, &spec);
    let a_theta = spec.flux / (2.0 * std::f64::consts::PI * spec.radius);
    Ok(json!({
        "voltage_V": cfg.voltage_v,
        "flux_Wb": spec.flux,
        "p_o_kg_m_per_s": state.momentum,
        "wavelength_m": state.wavelength,
        "A_theta_Wb_per_m": a_theta,
        "e_A_kg_m_per_s": state.constants.e * a_theta,
        "qri_upper": model.qri_upper,
        "qri_lower": model.qri_lower,
        "delta_n_q": model.delta_n_q,
        "interaction_length_m": model.interaction_length,
        "delta_phi_rad": delta_phi,
        "shift_fringes": delta_phi / (2.0 * std::f64::consts::PI),
    }))
}

fn run_loop(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let state = beam(cfg)?;
    let spec = solenoid(cfg)?;
    let center = Vec2::new(cfg.loop_center_x_m, cfg.loop_center_y_m);
    let path = match cfg.loop_shape {
        LoopShape::Circle => PolylinePath::circle(center, cfg.loop_radius_m, 512, cfg.loop_turns)?,
        LoopShape::Square => {
            if cfg.loop_turns != 1 {
                return Err(Error::Config(
                    "square loops are single-turn; set loop_turns = 1".into(),
                ));
            }
            PolylinePath::square(center, cfg.loop_radius_m)?
        }
    };
    let winding = path.winding_number(spec.center)?;
    let phase = ab_phase_loop(&state, &spec, &gauge(cfg), &path)?;
    Ok(json!({
        "winding_number": winding,
        "phase_rad": phase,
        "flux_Wb": spec.flux,
        "gauge": match cfg.gauge {
            GaugeChoice::Symmetric => "symmetric",
            GaugeChoice::StringOffset => "string-offset",
        },
    }))
}

fn run_fringes(cli: &Cli, cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let state = beam(cfg)?;
    let spec = solenoid(cfg)?;
    let geom = slit_geometry(cfg)?;
    let delta_phi = phase_plate_delta_phi(&state, &spec);
    let reference = two_slit_pattern(&geom, &state, 0.0);
    let pattern = two_slit_pattern(&geom, &state, delta_phi);
    let measured = extract_fringe_shift(&pattern, &reference)?;
    let predicted = fringe_shift_prediction(&geom, &state, spec.flux);
    output::emit_csv(&pattern, 1.0, &cli.out.join("pattern.csv"))?;
    output::emit_csv(&reference, 1.0, &cli.out.join("reference.csv"))?;
    progress(
        cli,
        &format!(
            "fringes: shift {measured:+.4e} m ({:+.4} fringes)",
            measured / pattern.fringe_spacing_hint
        ),
    );
    Ok(json!({
        "flux_Wb": spec.flux,
        "delta_phi_rad": delta_phi,
        "fringe_spacing_m": pattern.fringe_spacing_hint,
        "predicted_shift_m": predicted,
        "measured_shift_m": measured,
        "measured_shift_fringes": measured / pattern.fringe_spacing_hint,
        "pattern_csv": "pattern.csv",
        "reference_csv": "reference.csv",
    }))
}

/// One solver pass of the configured apparatus at the given flux fraction
/// and string angle, optionally dumping probability-density checkpoints.
fn solver_pass(
    cli: &Cli,
    cfg: &ExperimentConfig,
    alpha: f64,
    string_angle: f64,
    checkpoints: bool,
) -> Result<(FringePattern, ArrivalRecord, Vec<String>)> {
    let preset = cfg.to_preset(alpha, string_angle)?;
    let mask = ApparatusMask::build(&preset.grid, &preset.geometry)?;
    let packet = preset.beam()?;
    let every = if checkpoints { cfg.checkpoint_every } else { 0 };
    let mut written = Vec::new();
    let total = preset.grid.step_count;
    let grid = preset.grid;
    let out = cli.out.clone();
    let quiet = cli.quiet;
    let (pattern, record) = run_experiment_observed(
        &preset.grid,
        &mask,
        &packet,
        preset.screen_x,
        &mut |step, psi| {
            if !quiet && (step % 200 == 0 || step == total) {
                eprintln!("solver alpha {alpha:.3}: step {step}/{total}");
            }
            if every > 0 && step % every == 0 {
                let name = format!("checkpoint_{step:05}.csv");
                output::emit_density_grid(&grid, psi, &out.join(&name))?;
                written.push(name);
            }
            Ok(())
        },
    )?;
    Ok((pattern, record, written))
}

fn run_simulate(cli: &Cli, cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let alpha = cfg.resolved_alpha();
    let state = beam(cfg)?;
    // SI anchor: one internal length unit corresponds to the physical
    // de Broglie wavelength divided by the packet's internal wavelength.
    let k_mag = cfg.packet_momentum_iu.abs();
    if k_mag == 0.0 {
        return Err(Error::Config("packet_momentum_iu must be nonzero".into()));
    }
    let length_scale = state.wavelength * k_mag / (2.0 * std::f64::consts::PI);

    progress(cli, &format!("simulate: flux fraction {alpha:.4}"));
    let (pattern, record, checkpoints) =
        solver_pass(cli, cfg, alpha, cfg.string_angle_rad, true)?;
    let (reference, ref_record) = if alpha == 0.0 {
        (pattern.clone(), record.clone())
    } else {
        progress(cli, "simulate: zero-flux reference");
        let (p, r, _) = solver_pass(cli, cfg, 0.0, cfg.string_angle_rad, false)?;
        (p, r)
    };
    let shift = extract_fringe_shift(&pattern, &reference)?;
    let delay = arrival_time_delay(&ref_record, &record)?;
    output::emit_csv(&pattern, length_scale, &cli.out.join("pattern.csv"))?;
    output::emit_csv(&reference, length_scale, &cli.out.join("reference.csv"))?;
    Ok(json!({
        "alpha": alpha,
        "flux_Wb": effective_flux(cfg),
        "shift_fringes": shift / pattern.fringe_spacing_hint,
        "shift_m": shift * length_scale,
        "fringe_spacing_m": pattern.fringe_spacing_hint * length_scale,
        "length_scale_m_per_iu": length_scale,
        "transit_time_iu": ref_record.centroid_time,
        "arrival_delay_iu": delay,
        "crossing_probability": record.crossing_probability,
        "pattern_csv": "pattern.csv",
        "reference_csv": "reference.csv",
        "checkpoints": checkpoints,
    }))
}

/// Patterns repeat every fringe, so shifts live on a circle of unit
/// circumference and +0.5 and -0.5 are the same displacement.
fn circular_distance(delta_fringes: f64) -> f64 {
    (delta_fringes - delta_fringes.round()).abs()
}

fn run_gauge_check(cli: &Cli, cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let alpha = cfg.resolved_alpha();
    if cfg.string_angles_rad.is_empty() {
        return Err(Error::Config("string_angles must list at least one angle".into()));
    }
    // One flux-free reference serves every angle: with no flux the jump
    // line multiplies by unity, so the reference cannot see the string.
    let (reference, _, _) = solver_pass(cli, cfg, 0.0, cfg.string_angles_rad[0], false)?;
    let mut shifts = Vec::new();
    for &angle in &cfg.string_angles_rad {
        progress(cli, &format!("gauge-check: string angle {angle:.4} rad"));
        let (pattern, _, _) = solver_pass(cli, cfg, alpha, angle, false)?;
        let shift = extract_fringe_shift(&pattern, &reference)? / pattern.fringe_spacing_hint;
        progress(cli, &format!("gauge-check: shift {shift:+.4} fringes"));
        shifts.push(shift);
    }
    let base = shifts[0];
    let max_change = shifts
        .iter()
        .map(|s| circular_distance(s - base))
        .fold(0.0f64, f64::max);
    Ok(json!({
        "alpha": alpha,
        "angles_rad": cfg.string_angles_rad,
        "shifts_fringes": shifts,
        "max_change_fringes": max_change,
    }))
}

fn run_dispersion_check(cli: &Cli, cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let alpha = cfg.resolved_alpha();
    let scales = [1u32, 2, 4];
    let mut shifts = Vec::new();
    for scale in scales {
        progress(cli, &format!("dispersion-check: momentum scale x{scale}"));
        let pattern = crate::schrodinger::dispersion(scale, alpha)?.run()?.0;
        let reference = crate::schrodinger::dispersion(scale, 0.0)?.run()?.0;
        let shift = extract_fringe_shift(&pattern, &reference)? / pattern.fringe_spacing_hint;
        progress(cli, &format!("dispersion-check: shift {shift:+.4} fringes"));
        shifts.push(shift);
    }
    let mut max_pair = 0.0f64;
    for (i, a) in shifts.iter().enumerate() {
        for b in &shifts[i + 1..] {
            max_pair = max_pair.max(circular_distance(a - b));
        }
    }
    Ok(json!({
        "alpha": alpha,
        "scales": scales,
        "shifts_fringes": shifts,
        "max_pair_difference_fringes": max_pair,
    }))
}

fn run_accept(cli: &Cli) -> Result<()> {
    if cli.config.is_some() {
        return Err(Error::RejectedInput(
            "accept runs a fixed suite and takes no --config".into(),
        ));
    }
    let results = acceptance::run_all_with(|r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.passed).count();
    let summary: Vec<_> = results
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
            })
        })
        .collect();
    output::emit_summary(
        &json!({ "criteria": summary, "failed": failed }),
        &cli.out.join("acceptance.json"),
    )?;
    if failed > 0 {
        return Err(Error::NumericalContract(format!(
            "{failed} of {} acceptance criteria failed",
            results.len()
        )));
    }
    Ok(())
}

/// Entry point shared by the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;
    use tempfile::tempdir;

    fn cli_for(dir: &Path, cmd: Command) -> Cli {
        Cli {
            command: cmd,
            config: None,
            out: dir.to_path_buf(),
            seed: None,
            quiet: true,
        }
    }

    #[test]
    fn phase_summary_has_the_flux_quantum_turn() {
        let dir = tempdir().unwrap();
        run(&cli_for(dir.path(), Command::Phase)).unwrap();
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let dphi = v["delta_phi_rad"].as_f64().unwrap();
        assert!((dphi - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        assert!(dir.path().join("effective_config.txt").exists());
    }

    #[test]
    fn loop_summary_has_exactly_the_published_keys() {
        let dir = tempdir().unwrap();
        run(&cli_for(dir.path(), Command::Loop)).unwrap();
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(keys, ["flux_Wb", "gauge", "phase_rad", "winding_number"]);
        assert_eq!(v["winding_number"], 1);
    }

    #[test]
    fn fringes_writes_both_patterns() {
        let dir = tempdir().unwrap();
        run(&cli_for(dir.path(), Command::Fringes)).unwrap();
        let (y, i) = parse_pattern_csv(&dir.path().join("pattern.csv")).unwrap();
        assert_eq!(y.len(), 2049);
        assert_eq!(i.len(), 2049);
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        // One whole flux quantum: displacement is one full fringe.
        let meas = v["measured_shift_fringes"].as_f64().unwrap();
        assert!(meas.abs() < 0.01 || (meas.abs() - 1.0).abs() < 0.01);
    }

    #[test]
    fn accept_rejects_a_config_file() {
        let dir = tempdir().unwrap();
        let mut cli = cli_for(dir.path(), Command::Accept);
        cli.config = Some(dir.path().join("x.cfg"));
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
