//! Flat key = value experiment configuration.
//!
//! Physical quantities carry a mandatory unit suffix (`voltage = 10 kV`,
//! `flux = 0.5 flux_quantum`); solver quantities use `_iu` keys and bare
//! numbers (internal units, hbar = m = 1). Unknown keys, duplicate keys,
//! missing units and malformed numbers are all rejected with the offending
//! line number. Every key is valid for every experiment kind; kinds simply
//! ignore knobs they do not use, which keeps the effective-config emission
//! a single schema.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::schrodinger::{self, ExperimentPreset, GridSpec, MaskGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Phase,
    Loop,
    Fringes,
    Simulate,
    GaugeCheck,
    DispersionCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Phase => "phase",
            Kind::Loop => "loop",
            Kind::Fringes => "fringes",
            Kind::Simulate => "simulate",
            Kind::GaugeCheck => "gauge-check",
            Kind::DispersionCheck => "dispersion-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeChoice {
    Symmetric,
    StringOffset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopShape {
    Circle,
    Square,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    // SI-facing parameters.
    pub voltage_v: f64,
    pub flux_wb: f64,
    /// Flux fraction override; resolved from `flux` when absent.
    pub alpha: Option<f64>,
    pub solenoid_radius_m: f64,
    pub slit_spacing_m: f64,
    pub slit_width_m: f64,
    pub screen_distance_m: f64,
    pub screen_half_extent_m: f64,
    pub screen_samples: usize,
    pub gauge: GaugeChoice,
    pub string_angle_rad: f64,
    pub string_angles_rad: Vec<f64>,
    pub loop_radius_m: f64,
    pub loop_center_x_m: f64,
    pub loop_center_y_m: f64,
    pub loop_turns: i32,
    pub loop_shape: LoopShape,
    // Solver-facing parameters, internal units.
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub cell_iu: f64,
    pub time_step_iu: f64,
    pub step_count: usize,
    pub packet_center_x_iu: f64,
    pub packet_sigma_x_iu: f64,
    pub packet_sigma_y_iu: f64,
    pub lobe_offset_iu: f64,
    pub packet_momentum_iu: f64,
    pub sim_slit_spacing_iu: f64,
    pub sim_slit_width_iu: f64,
    pub barrier_width_iu: f64,
    pub barrier_rate_iu: f64,
    pub absorber_rate_iu: f64,
    pub absorber_frac: f64,
    pub solenoid_x_iu: f64,
    pub solenoid_y_iu: f64,
    pub shield_radius_iu: f64,
    pub screen_x_iu: f64,
    pub checkpoint_every: usize,
}

fn flux_quantum() -> f64 {
    PhysicalConstants::electron().flux_quantum
}

impl ExperimentConfig {
    /// Defaults: the worked 10 kV / 5 um / one-flux-quantum scenario for the
    /// analytic kinds, the desk preset for the solver. The sweep kinds
    /// default to the fractional flux their check is about (a whole flux
    /// quantum would make every sweep point trivially identical).
    pub fn defaults(kind: Kind) -> Self {
        let desk = schrodinger::desk(0.0);
        let pi = std::f64::consts::PI;
        let flux_wb = match kind {
            Kind::GaugeCheck => 0.25 * flux_quantum(),
            Kind::DispersionCheck => 0.5 * flux_quantum(),
            _ => flux_quantum(),
        };
        ExperimentConfig {
            kind,
            voltage_v: 10e3,
            flux_wb,
            alpha: None,
            solenoid_radius_m: 5e-6,
            slit_spacing_m: 1e-6,
            slit_width_m: 0.28e-6,
            screen_distance_m: 1.0,
            screen_half_extent_m: 130e-6,
            screen_samples: 2049,
            gauge: GaugeChoice::Symmetric,
            string_angle_rad: pi,
            // Rays that keep the jump line inside the dark channel between
            // the beam lobes over the whole approach; wider tilts let the
            // line clip a lobe flank and the imprint stops being clean.
            string_angles_rad: vec![
                pi,
                pi - pi / 60.0,
                pi - pi / 120.0,
                pi + pi / 120.0,
                pi + pi / 60.0,
            ],
            loop_radius_m: 10e-6,
            loop_center_x_m: 0.0,
            loop_center_y_m: 0.0,
            loop_turns: 1,
            loop_shape: LoopShape::Circle,
            grid_nx: desk.grid.nx,
            grid_ny: desk.grid.ny,
            cell_iu: desk.grid.dx(),
            time_step_iu: desk.grid.dt,
            step_count: desk.grid.step_count,
            packet_center_x_iu: desk.beam_center_x,
            packet_sigma_x_iu: desk.beam_sigma_x,
            packet_sigma_y_iu: desk.beam_sigma_y,
            lobe_offset_iu: desk.lobe_offset,
            packet_momentum_iu: desk.packet_momentum.x,
            sim_slit_spacing_iu: desk.geometry.slit_spacing,
            sim_slit_width_iu: desk.geometry.slit_width,
            barrier_width_iu: desk.geometry.barrier_width,
            barrier_rate_iu: desk.geometry.barrier_rate,
            absorber_rate_iu: desk.geometry.absorber_rate,
            absorber_frac: desk.geometry.absorber_frac,
            solenoid_x_iu: desk.geometry.solenoid.x,
            solenoid_y_iu: desk.geometry.solenoid.y,
            shield_radius_iu: desk.geometry.shield_radius,
            screen_x_iu: desk.screen_x,
            checkpoint_every: 0,
        }
    }

    /// Flux fraction driving the solver: the explicit `alpha` key wins,
    /// otherwise the configured flux in flux quanta.
    pub fn resolved_alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.flux_wb / flux_quantum())
    }

    /// Parse config text over the defaults for `kind`.
    pub fn parse(kind: Kind, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(kind);
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let n = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {n}: expected 'key = value', found {raw:?}"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Config(format!("line {n}: key '{key}' has no value")));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {n}: duplicate key '{key}'")));
            }
            cfg.apply(key, value, n)?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, n: usize) -> Result<()> {
        match key {
            "voltage" => self.voltage_v = with_unit(value, VOLTAGE_UNITS, key, n)?,
            "flux" => self.flux_wb = with_unit(value, FLUX_UNITS, key, n)?,
            "alpha" => self.alpha = Some(bare_float(value, key, n)?),
            "solenoid_radius" => self.solenoid_radius_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "slit_spacing" => self.slit_spacing_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "slit_width" => self.slit_width_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "screen_distance" => self.screen_distance_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "screen_half_extent" => {
                self.screen_half_extent_m = with_unit(value, LENGTH_UNITS, key, n)?
            }
            "screen_samples" => self.screen_samples = bare_usize(value, key, n)?,
            "gauge" => {
                self.gauge = match value {
                    "symmetric" => GaugeChoice::Symmetric,
                    "string-offset" => GaugeChoice::StringOffset,
                    other => {
                        return Err(Error::Config(format!(
                            "line {n}: gauge must be 'symmetric' or 'string-offset', got {other:?}"
                        )))
                    }
                }
            }
            "string_angle" => self.string_angle_rad = with_unit(value, ANGLE_UNITS, key, n)?,
            "string_angles" => self.string_angles_rad = angle_list(value, key, n)?,
            "loop_radius" => self.loop_radius_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "loop_center_x" => self.loop_center_x_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "loop_center_y" => self.loop_center_y_m = with_unit(value, LENGTH_UNITS, key, n)?,
            "loop_turns" => {
                self.loop_turns = bare_int(value, key, n)?;
                if self.loop_turns == 0 {
                    return Err(Error::Config(format!("line {n}: loop_turns must be nonzero")));
                }
            }
            "loop_shape" => {
                self.loop_shape = match value {
                    "circle" => LoopShape::Circle,
                    "square" => LoopShape::Square,
                    other => {
                        return Err(Error::Config(format!(
                            "line {n}: loop_shape must be 'circle' or 'square', got {other:?}"
                        )))
                    }
                }
            }
            "grid_nx" => self.grid_nx = bare_usize(value, key, n)?,
            "grid_ny" => self.grid_ny = bare_usize(value, key, n)?,
            "cell_iu" => self.cell_iu = bare_float(value, key, n)?,
            "time_step_iu" => self.time_step_iu = bare_float(value, key, n)?,
            "step_count" => self.step_count = bare_usize(value, key, n)?,
            "packet_center_x_iu" => self.packet_center_x_iu = bare_float(value, key, n)?,
            "packet_sigma_x_iu" => self.packet_sigma_x_iu = bare_float(value, key, n)?,
            "packet_sigma_y_iu" => self.packet_sigma_y_iu = bare_float(value, key, n)?,
            "lobe_offset_iu" => self.lobe_offset_iu = bare_float(value, key, n)?,
            "packet_momentum_iu" => self.packet_momentum_iu = bare_float(value, key, n)?,
            "sim_slit_spacing_iu" => self.sim_slit_spacing_iu = bare_float(value, key, n)?,
            "sim_slit_width_iu" => self.sim_slit_width_iu = bare_float(value, key, n)?,
            "barrier_width_iu" => self.barrier_width_iu = bare_float(value, key, n)?,
            "barrier_rate_iu" => self.barrier_rate_iu = bare_float(value, key, n)?,
            "absorber_rate_iu" => self.absorber_rate_iu = bare_float(value, key, n)?,
            "absorber_frac" => self.absorber_frac = bare_float(value, key, n)?,
            "solenoid_x_iu" => self.solenoid_x_iu = bare_float(value, key, n)?,
            "solenoid_y_iu" => self.solenoid_y_iu = bare_float(value, key, n)?,
            "shield_radius_iu" => self.shield_radius_iu = bare_float(value, key, n)?,
            "screen_x_iu" => self.screen_x_iu = bare_float(value, key, n)?,
            "checkpoint_every" => self.checkpoint_every = bare_usize(value, key, n)?,
            other => {
                return Err(Error::Config(format!("line {n}: unknown key '{other}'")));
            }
        }
        Ok(())
    }

    /// Full resolved configuration, alphabetical, SI base units only.
    /// Parsing this text back reproduces the configuration exactly.
    pub fn effective_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# effective configuration for '{}'", self.kind.name());
        let _ = writeln!(s, "absorber_frac = {:e}", self.absorber_frac);
        let _ = writeln!(s, "absorber_rate_iu = {:e}", self.absorber_rate_iu);
        let _ = writeln!(s, "alpha = {:e}", self.resolved_alpha());
        let _ = writeln!(s, "barrier_rate_iu = {:e}", self.barrier_rate_iu);
        let _ = writeln!(s, "barrier_width_iu = {:e}", self.barrier_width_iu);
        let _ = writeln!(s, "cell_iu = {:e}", self.cell_iu);
        let _ = writeln!(s, "checkpoint_every = {}", self.checkpoint_every);
        let _ = writeln!(s, "flux = {:e} Wb", self.flux_wb);
        let _ = writeln!(
            s,
            "gauge = {}",
            match self.gauge {
                GaugeChoice::Symmetric => "symmetric",
                GaugeChoice::StringOffset => "string-offset",
            }
        );
        let _ = writeln!(s, "grid_nx = {}", self.grid_nx);
        let _ = writeln!(s, "grid_ny = {}", self.grid_ny);
        let _ = writeln!(s, "lobe_offset_iu = {:e}", self.lobe_offset_iu);
        let _ = writeln!(s, "loop_center_x = {:e} m", self.loop_center_x_m);
        let _ = writeln!(s, "loop_center_y = {:e} m", self.loop_center_y_m);
        let _ = writeln!(s, "loop_radius = {:e} m", self.loop_radius_m);
        let _ = writeln!(
            s,
            "loop_shape = {}",
            match self.loop_shape {
                LoopShape::Circle => "circle",
                LoopShape::Square => "square",
            }
        );
        let _ = writeln!(s, "loop_turns = {}", self.loop_turns);
        let _ = writeln!(s, "packet_center_x_iu = {:e}", self.packet_center_x_iu);
        let _ = writeln!(s, "packet_momentum_iu = {:e}", self.packet_momentum_iu);
        let _ = writeln!(s, "packet_sigma_x_iu = {:e}", self.packet_sigma_x_iu);
        let _ = writeln!(s, "packet_sigma_y_iu = {:e}", self.packet_sigma_y_iu);
        let _ = writeln!(s, "screen_distance = {:e} m", self.screen_distance_m);
        let _ = writeln!(s, "screen_half_extent = {:e} m", self.screen_half_extent_m);
        let _ = writeln!(s, "screen_samples = {}", self.screen_samples);
        let _ = writeln!(s, "screen_x_iu = {:e}", self.screen_x_iu);
        let _ = writeln!(s, "shield_radius_iu = {:e}", self.shield_radius_iu);
        let _ = writeln!(s, "sim_slit_spacing_iu = {:e}", self.sim_slit_spacing_iu);
        let _ = writeln!(s, "sim_slit_width_iu = {:e}", self.sim_slit_width_iu);
        let _ = writeln!(s, "slit_spacing = {:e} m", self.slit_spacing_m);
        let _ = writeln!(s, "slit_width = {:e} m", self.slit_width_m);
        let _ = writeln!(s, "solenoid_radius = {:e} m", self.solenoid_radius_m);
        let _ = writeln!(s, "solenoid_x_iu = {:e}", self.solenoid_x_iu);
        let _ = writeln!(s, "solenoid_y_iu = {:e}", self.solenoid_y_iu);
        let _ = writeln!(s, "step_count = {}", self.step_count);
        let _ = writeln!(s, "string_angle = {:e} rad", self.string_angle_rad);
        let angles = self
            .string_angles_rad
            .iter()
            .map(|a| format!("{a:e}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, "string_angles = {angles} rad");
        let _ = writeln!(s, "time_step_iu = {:e}", self.time_step_iu);
        let _ = writeln!(s, "voltage = {:e} V", self.voltage_v);
        s
    }

    /// Solver preset assembled from the `_iu` keys.
    pub fn to_preset(&self, alpha: f64, string_angle: f64) -> Result<ExperimentPreset> {
        let lx = self.cell_iu * self.grid_nx as f64;
        let ly = self.cell_iu * self.grid_ny as f64;
        if !(self.cell_iu.is_finite() && self.cell_iu > 0.0) {
            return Err(Error::Config(format!(
                "cell_iu must be positive, got {}",
                self.cell_iu
            )));
        }
        let grid = GridSpec::new(
            self.grid_nx,
            self.grid_ny,
            lx,
            ly,
            -lx / 2.0,
            -ly / 2.0,
            self.time_step_iu,
            self.step_count,
        )?;
        Ok(ExperimentPreset {
            grid,
            geometry: MaskGeometry {
                barrier_x: 0.0,
                barrier_width: self.barrier_width_iu,
                slit_spacing: self.sim_slit_spacing_iu,
                slit_width: self.sim_slit_width_iu,
                barrier_rate: self.barrier_rate_iu,
                absorber_frac: self.absorber_frac,
                absorber_rate: self.absorber_rate_iu,
                solenoid: Vec2::new(self.solenoid_x_iu, self.solenoid_y_iu),
                shield_radius: self.shield_radius_iu,
                flux_fraction: alpha,
                string_angle,
            },
            beam_center_x: self.packet_center_x_iu,
            beam_sigma_x: self.packet_sigma_x_iu,
            beam_sigma_y: self.packet_sigma_y_iu,
            lobe_offset: self.lobe_offset_iu,
            packet_momentum: Vec2::new(self.packet_momentum_iu, 0.0),
            screen_x: self.screen_x_iu,
        })
    }
}

const VOLTAGE_UNITS: &[(&str, f64)] = &[("V", 1.0), ("kV", 1e3), ("MV", 1e6)];
const LENGTH_UNITS: &[(&str, f64)] = &[
    ("m", 1.0),
    ("cm", 1e-2),
    ("mm", 1e-3),
    ("um", 1e-6),
    ("nm", 1e-9),
    ("pm", 1e-12),
];
const ANGLE_UNITS: &[(&str, f64)] = &[
    ("rad", 1.0),
    ("mrad", 1e-3),
    ("deg", std::f64::consts::PI / 180.0),
];
/// Flux units resolve lazily: the flux quantum is a derived constant.
const FLUX_UNITS: &[(&str, f64)] = &[("Wb", 1.0), ("flux_quantum", f64::NAN)];

fn unit_factor(unit: &str, table: &[(&str, f64)]) -> Option<f64> {
    let factor = table.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)?;
    Some(if factor.is_nan() { flux_quantum() } else { factor })
}

fn with_unit(value: &str, table: &[(&str, f64)], key: &str, n: usize) -> Result<f64> {
    let units = || {
        table
            .iter()
            .map(|(u, _)| *u)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut tokens = value.split_whitespace();
    let (num, unit) = match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(num), Some(unit), None) => (num, unit),
        _ => {
            return Err(Error::Config(format!(
                "line {n}: '{key}' needs '<number> <unit>' with unit one of [{}]",
                units()
            )))
        }
    };
    let factor = unit_factor(unit, table).ok_or_else(|| {
        Error::Config(format!(
            "line {n}: '{key}' has unknown unit '{unit}' (expected one of [{}])",
            units()
        ))
    })?;
    let parsed: f64 = num.parse().map_err(|_| {
        Error::Config(format!("line {n}: '{key}' has a malformed number {num:?}"))
    })?;
    Ok(parsed * factor)
}

fn angle_list(value: &str, key: &str, n: usize) -> Result<Vec<f64>> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    let (unit, nums) = match tokens.split_last() {
        Some((unit, nums)) if !nums.is_empty() => (*unit, nums),
        _ => {
            return Err(Error::Config(format!(
                "line {n}: '{key}' needs '<number>... <unit>' with unit one of [rad, mrad, deg]"
            )))
        }
    };
    let factor = unit_factor(unit, ANGLE_UNITS).ok_or_else(|| {
        Error::Config(format!(
            "line {n}: '{key}' has unknown angle unit '{unit}' (expected rad, mrad or deg)"
        ))
    })?;
    nums.iter()
        .map(|s| {
            s.parse::<f64>().map(|v| v * factor).map_err(|_| {
                Error::Config(format!("line {n}: '{key}' has a malformed number {s:?}"))
            })
        })
        .collect()
}

fn bare_numeric<'a>(value: &'a str, key: &str, n: usize) -> Result<&'a str> {
    let mut tokens = value.split_whitespace();
    match (tokens.next(), tokens.next()) {
        (Some(tok), None) => Ok(tok),
        _ => Err(Error::Config(format!(
            "line {n}: '{key}' takes a bare number (internal units / counts carry no unit)"
        ))),
    }
}

fn bare_float(value: &str, key: &str, n: usize) -> Result<f64> {
    bare_numeric(value, key, n)?.parse().map_err(|_| {
        Error::Config(format!("line {n}: '{key}' has a malformed number {value:?}"))
    })
}

fn bare_usize(value: &str, key: &str, n: usize) -> Result<usize> {
    bare_numeric(value, key, n)?.parse().map_err(|_| {
        Error::Config(format!(
            "line {n}: '{key}' must be a nonnegative integer, got {value:?}"
        ))
    })
}

fn bare_int(value: &str, key: &str, n: usize) -> Result<i32> {
    bare_numeric(value, key, n)?.parse().map_err(|_| {
        Error::Config(format!("line {n}: '{key}' must be an integer, got {value:?}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_carry_the_worked_scenario() {
        let cfg = ExperimentConfig::defaults(Kind::Phase);
        assert_eq!(cfg.voltage_v, 10e3);
        assert_eq!(cfg.solenoid_radius_m, 5e-6);
        assert!((cfg.flux_wb - flux_quantum()).abs() < 1e-25);
        assert!((cfg.resolved_alpha() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn units_convert_and_are_mandatory() {
        let cfg = ExperimentConfig::parse(
            Kind::Fringes,
            "voltage = 10 kV\nslit_spacing = 1 um\nflux = 0.5 flux_quantum\n",
        )
        .unwrap();
        assert_eq!(cfg.voltage_v, 1e4);
        assert_eq!(cfg.slit_spacing_m, 1e-6);
        assert!((cfg.resolved_alpha() - 0.5).abs() < 1e-12);

        let err = ExperimentConfig::parse(Kind::Fringes, "voltage = 10\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("line 1")), "{err}");
        let err = ExperimentConfig::parse(Kind::Fringes, "\nvoltage = 10 parsec\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("line 2")), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected_with_line_info() {
        let err = ExperimentConfig::parse(Kind::Phase, "# ok\nvoltagee = 10 kV\n").unwrap_err();
        assert!(
            matches!(err, Error::Config(ref m) if m.contains("line 2") && m.contains("voltagee")),
            "{err}"
        );
        let err =
            ExperimentConfig::parse(Kind::Phase, "voltage = 10 kV\nvoltage = 20 kV\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("duplicate")), "{err}");
    }

    #[test]
    fn solver_keys_refuse_units() {
        let err =
            ExperimentConfig::parse(Kind::Simulate, "packet_sigma_x_iu = 4 m\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("bare number")), "{err}");
        let cfg = ExperimentConfig::parse(Kind::Simulate, "packet_sigma_x_iu = 3.5\n").unwrap();
        assert_eq!(cfg.packet_sigma_x_iu, 3.5);
    }

    #[test]
    fn comments_blank_lines_and_angle_lists_parse() {
        let text = "\n# heading\nstring_angles = 180 170 190 deg  # sweep\ngauge = string-offset\n";
        let cfg = ExperimentConfig::parse(Kind::GaugeCheck, text).unwrap();
        assert_eq!(cfg.string_angles_rad.len(), 3);
        assert!((cfg.string_angles_rad[0] - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(cfg.gauge, GaugeChoice::StringOffset);
    }

    #[test]
    fn effective_text_round_trips_exactly() {
        let mut cfg = ExperimentConfig::defaults(Kind::Simulate);
        cfg.alpha = Some(0.37);
        cfg.flux_wb = 2.5e-16;
        cfg.loop_turns = -3;
        cfg.loop_shape = LoopShape::Square;
        cfg.string_angles_rad = vec![3.0, 3.3];
        let text = cfg.effective_text();
        let reparsed = ExperimentConfig::parse(Kind::Simulate, &text).unwrap();
        // alpha is resolved on emission, so compare through that lens.
        let mut resolved = cfg.clone();
        resolved.alpha = Some(cfg.resolved_alpha());
        assert_eq!(reparsed, resolved);
    }

    #[test]
    fn preset_assembly_honors_overrides() {
        let cfg = ExperimentConfig::parse(
            Kind::Simulate,
            "grid_nx = 256\ngrid_ny = 256\nstep_count = 650\ntime_step_iu = 0.0196\n",
        )
        .unwrap();
        let preset = cfg.to_preset(0.25, std::f64::consts::PI).unwrap();
        assert_eq!(preset.grid.nx, 256);
        assert_eq!(preset.grid.step_count, 650);
        assert!((preset.geometry.flux_fraction - 0.25).abs() < 1e-15);
        // A bad grid surfaces as a config-class error.
        let cfg = ExperimentConfig::parse(Kind::Simulate, "grid_nx = 100\n").unwrap();
        assert!(cfg.to_preset(0.0, std::f64::consts::PI).is_err());
    }
}
