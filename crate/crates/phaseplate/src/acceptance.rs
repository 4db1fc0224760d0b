//! Machine-checkable verification suite.
//!
//! Every criterion compares a library capability against an independent
//! expectation: a closed-form value, a second code path, or the PDE solver.
//! Each returns one record with a pass flag and the measured numbers, so
//! both the `accept` subcommand and the acceptance test target can print a
//! single line per check. Solver runs are cached process-wide (keyed on the
//! exact parameters) because several criteria share the zero-flux reference
//! and the runs cost tens of seconds each.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::constants::PhysicalConstants;
use crate::error::Result;
use crate::fields::{Gauge, SolenoidSpec};
use crate::fringes::{
    envelope_centroid, extract_fringe_shift, fringe_shift_prediction, two_slit_pattern,
    FringePattern, SlitGeometry,
};
use crate::geom::{Direction, Vec2};
use crate::phase::{ab_phase_loop, phase_plate_delta_phi, ElectronState, PolylinePath};
use crate::schrodinger::{
    self, analytic_free_gaussian, arrival_time_delay, initialize_packet, norm, ArrivalRecord,
    Engine, GridSpec,
};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] criterion {} ({}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Run every criterion, invoking `report` as each one finishes.
pub fn run_all_with<F: FnMut(&CriterionResult)>(mut report: F) -> Vec<CriterionResult> {
    let checks: [fn() -> CriterionResult; 9] = [
        reference_values,
        loop_phases,
        plate_matches_loop,
        analytic_shifts,
        solver_shifts,
        string_angles,
        dispersion_immunity,
        flux_periodicity,
        free_packet_fidelity,
    ];
    let mut out = Vec::with_capacity(checks.len());
    for check in checks {
        let r = check();
        report(&r);
        out.push(r);
    }
    out
}

pub fn run_all() -> Vec<CriterionResult> {
    run_all_with(|_| ())
}

fn finish(id: u32, name: &'static str, body: Result<(bool, String)>) -> CriterionResult {
    match body {
        Ok((passed, detail)) => CriterionResult {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

fn rel(measured: f64, expected: f64) -> f64 {
    (measured - expected).abs() / expected.abs()
}

/// Distance from `x` to the nearest integer; shifts and flux fractions
/// compare modulo one fringe.
fn mod1(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn beam_10kv() -> Result<ElectronState> {
    ElectronState::from_voltage(PhysicalConstants::electron(), 10e3)
}

fn bench_solenoid(flux: f64) -> Result<SolenoidSpec> {
    SolenoidSpec::new(Vec2::new(0.0, 0.0), 5e-6, flux)
}

fn bench_slits() -> Result<SlitGeometry> {
    SlitGeometry::new(1e-6, 0.28e-6, 1.0, 130e-6, 2049)
}

// ---------------------------------------------------------------------------
// Cached solver runs. The value is computed while holding the lock on
// purpose: criteria run on parallel test threads, and a 1024 x 1024 run
// should never execute twice, nor should two of them compete for the core.

type SharedRun = std::result::Result<Arc<(FringePattern, ArrivalRecord)>, String>;

fn desk_run(alpha: f64, string_angle: f64) -> SharedRun {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), SharedRun>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|p| p.into_inner());
    let key = (alpha.to_bits(), string_angle.to_bits());
    if let Some(hit) = map.get(&key) {
        return hit.clone();
    }
    let run = schrodinger::desk_with_string(alpha, string_angle)
        .run()
        .map(Arc::new)
        .map_err(|e| e.to_string());
    map.insert(key, run.clone());
    run
}

fn dispersion_run(scale: u32, alpha: f64) -> SharedRun {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), SharedRun>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|p| p.into_inner());
    let key = (scale, alpha.to_bits());
    if let Some(hit) = map.get(&key) {
        return hit.clone();
    }
    let run = schrodinger::dispersion(scale, alpha)
        .and_then(|p| p.run())
        .map(Arc::new)
        .map_err(|e| e.to_string());
    map.insert(key, run.clone());
    run
}

fn shared(run: SharedRun) -> Result<Arc<(FringePattern, ArrivalRecord)>> {
    run.map_err(crate::error::Error::IncompleteRun)
}

/// Measured displacement in fringe units for a desk run against the
/// zero-flux reference at the same string angle.
fn desk_shift_fringes(alpha: f64, string_angle: f64) -> Result<f64> {
    let reference = shared(desk_run(0.0, string_angle))?;
    let pattern = shared(desk_run(alpha, string_angle))?;
    let shift = extract_fringe_shift(&pattern.0, &reference.0)?;
    Ok(shift / pattern.0.fringe_spacing_hint)
}

// ---------------------------------------------------------------------------
// Criteria.

/// 10 kV beam alongside a 5 um solenoid holding one flux quantum: momentum,
/// wall potential and momentum offset land on the published three-digit
/// values, and the arm phase difference is exactly one turn.
pub fn reference_values() -> CriterionResult {
    finish(1, "reference scenario values", (|| {
        let state = beam_10kv()?;
        let spec = bench_solenoid(state.constants.flux_quantum)?;
        let a_theta = spec.flux / (2.0 * std::f64::consts::PI * spec.radius);
        let e_a = state.constants.e * a_theta;
        let delta_phi = phase_plate_delta_phi(&state, &spec);
        let checks = [
            ("p_o", state.momentum, 5.40e-23, 5e-3),
            ("A_theta", a_theta, 1.32e-10, 5e-3),
            ("e A_theta", e_a, 2.11e-29, 5e-3),
            ("delta_phi", delta_phi, 2.0 * std::f64::consts::PI, 1e-9),
        ];
        let worst = checks
            .iter()
            .map(|&(_, m, e, t)| rel(m, e) / t)
            .fold(0.0f64, f64::max);
        let detail = checks
            .iter()
            .map(|&(what, m, e, t)| format!("{what} {m:.4e} vs {e:.4e} (rel {:.1e}, tol {t:.0e})", rel(m, e)))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((worst <= 1.0, detail))
    })())
}

/// Loop phases are purely topological: e Phi / hbar times the winding
/// number for enclosing loops of any shape in either gauge, zero for
/// non-enclosing loops even when they straddle the gauge string.
pub fn loop_phases() -> CriterionResult {
    finish(2, "loop phase topology", (|| {
        let state = beam_10kv()?;
        let spec = bench_solenoid(state.constants.flux_quantum)?;
        let r = spec.radius;
        let expected = state.constants.e * spec.flux / state.constants.hbar;
        let gauges = [
            ("symmetric", Gauge::Symmetric),
            (
                "string-offset",
                Gauge::StringOffset {
                    string_direction: Direction::from_angle(2.3),
                },
            ),
        ];
        let mut enclosing: Vec<(String, PolylinePath)> = Vec::new();
        for factor in [2.0, 5.0, 20.0] {
            enclosing.push((
                format!("circle {factor}R"),
                PolylinePath::circle(spec.center, factor * r, 512, 1)?,
            ));
        }
        enclosing.push(("square 3R".into(), PolylinePath::square(spec.center, 3.0 * r)?));
        let clear = PolylinePath::circle(Vec2::new(4.0 * r, 0.0), r, 512, 1)?;
        let astride = PolylinePath::circle(
            Direction::from_angle(2.3).vec().scale(4.0 * r),
            r,
            512,
            1,
        )?;

        let mut worst_rel = 0.0f64;
        let mut worst_abs = 0.0f64;
        for (gname, gauge) in &gauges {
            for (pname, path) in &enclosing {
                let phase = ab_phase_loop(&state, &spec, gauge, path)?;
                let e = rel(phase, expected);
                if e > worst_rel {
                    worst_rel = e;
                }
                if e > 1e-9 {
                    return Ok((false, format!("{pname} in {gname} gauge off by rel {e:.2e}")));
                }
            }
            for (pname, path) in [("clear circle", &clear), ("string-straddling circle", &astride)]
            {
                let phase = ab_phase_loop(&state, &spec, gauge, path)?;
                worst_abs = worst_abs.max(phase.abs());
                if phase.abs() > 1e-9 {
                    return Ok((false, format!("non-enclosing {pname} in {gname} gauge picked up {phase:.2e} rad")));
                }
            }
        }
        Ok((true, format!(
            "enclosing loops rel err <= {worst_rel:.1e} (tol 1e-9); non-enclosing |phase| <= {worst_abs:.1e} rad (tol 1e-9)"
        )))
    })())
}

/// The plate-model phase difference equals the loop-integral phase for the
/// same solenoid across a flux sweep.
pub fn plate_matches_loop() -> CriterionResult {
    finish(3, "plate phase equals loop phase", (|| {
        let state = beam_10kv()?;
        let fq = state.constants.flux_quantum;
        let mut worst = 0.0f64;
        for k in 0..20 {
            let flux = (k as f64 - 9.5) / 5.0 * fq;
            let spec = bench_solenoid(flux)?;
            let plate = phase_plate_delta_phi(&state, &spec);
            let path = PolylinePath::circle(spec.center, 3.0 * spec.radius, 512, 1)?;
            let looped = ab_phase_loop(&state, &spec, &Gauge::Symmetric, &path)?;
            worst = worst.max(rel(looped, plate));
        }
        Ok((
            worst <= 1e-12,
            format!("20 fluxes in [-1.9, 1.9] flux quanta, max rel difference {worst:.2e} (tol 1e-12)"),
        ))
    })())
}

/// Synthesized double-slit patterns move by exactly the closed-form fringe
/// displacement, and half a flux quantum interchanges maxima and minima.
pub fn analytic_shifts() -> CriterionResult {
    finish(4, "closed-form fringe shifts", (|| {
        let state = beam_10kv()?;
        let geom = bench_slits()?;
        let fq = state.constants.flux_quantum;
        let reference = two_slit_pattern(&geom, &state, 0.0);
        let lam = reference.fringe_spacing_hint;
        let mut worst = 0.0f64;
        for k in 0..20 {
            let flux = (2.0 * k as f64 / 19.0 - 1.0) * fq;
            let spec = bench_solenoid(flux)?;
            let pattern = two_slit_pattern(&geom, &state, phase_plate_delta_phi(&state, &spec));
            let measured = extract_fringe_shift(&pattern, &reference)?;
            let predicted = fringe_shift_prediction(&geom, &state, flux);
            worst = worst.max(mod1((measured - predicted) / lam));
        }
        // Half a flux quantum: the reference peak position becomes a null.
        let spec = bench_solenoid(0.5 * fq)?;
        let half = two_slit_pattern(&geom, &state, phase_plate_delta_phi(&state, &spec));
        let center = half.screen_positions.len() / 2;
        let depth = half.intensity[center];
        let half_shift = extract_fringe_shift(&half, &reference)?.abs();
        let half_miss = (half_shift - 0.5 * lam).abs() / lam;
        let ok = worst <= 0.01 && depth <= 1e-3 && half_miss <= 0.01;
        Ok((ok, format!(
            "20 fluxes over [-1, 1] flux quanta, worst shift miss {:.2e} fringes (tol 0.01); \
             half-quantum: center intensity {depth:.1e}, |shift| {:.4} fringes",
            worst,
            half_shift / lam
        )))
    })())
}

/// The wavepacket solver reproduces the flux-fraction fringe displacement
/// at five flux settings while the envelope stays put.
pub fn solver_shifts() -> CriterionResult {
    finish(5, "solver fringe shifts", (|| {
        let angle = std::f64::consts::PI;
        let reference = shared(desk_run(0.0, angle))?;
        let lam = reference.0.fringe_spacing_hint;
        let ref_env = envelope_centroid(&reference.0);
        let mut rows = Vec::new();
        let mut worst_shift = 0.0f64;
        let mut worst_env = 0.0f64;
        for alpha in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let pattern = shared(desk_run(alpha, angle))?;
            let shift = extract_fringe_shift(&pattern.0, &reference.0)? / lam;
            let env = (envelope_centroid(&pattern.0) - ref_env).abs() / lam;
            worst_shift = worst_shift.max(mod1(shift - alpha));
            worst_env = worst_env.max(env);
            rows.push(format!("alpha {alpha}: shift {shift:+.4}"));
        }
        let ok = worst_shift <= 0.02 && worst_env <= 0.05;
        Ok((ok, format!(
            "{}; worst miss {worst_shift:.4} fringes (tol 0.02), envelope drift {worst_env:.4} fringes (tol 0.05)",
            rows.join(", ")
        )))
    })())
}

/// Moving the gauge string (the phase-jump ray in the solver mask) leaves
/// the measured displacement unchanged.
pub fn string_angles() -> CriterionResult {
    finish(6, "string angle invariance", (|| {
        let pi = std::f64::consts::PI;
        let alpha = 0.25;
        let base = desk_shift_fringes(alpha, pi)?;
        let mut worst = 0.0f64;
        let mut rows = vec![format!("angle {pi:.3}: {base:+.4}")];
        // Tilts that keep the jump line in the dark channel between the
        // beam lobes for the whole approach to the slits.
        for angle in [pi - pi / 60.0, pi - pi / 120.0, pi + pi / 120.0, pi + pi / 60.0] {
            let shift = desk_shift_fringes(alpha, angle)?;
            worst = worst.max((shift - base).abs());
            rows.push(format!("angle {angle:.3}: {shift:+.4}"));
        }
        Ok((
            worst <= 0.005,
            format!("{}; max change {worst:.2e} fringes (tol 0.005)", rows.join(", ")),
        ))
    })())
}

/// The displacement in fringe units does not depend on the beam momentum
/// (three solver momenta), the closed-form phase does not depend on the
/// accelerating voltage, and the flux leaves arrival times untouched.
pub fn dispersion_immunity() -> CriterionResult {
    finish(7, "dispersion immunity", (|| {
        let constants = PhysicalConstants::electron();
        let spec = bench_solenoid(0.4 * constants.flux_quantum)?;
        let mut phis = Vec::new();
        for kv in [1.0, 3.16, 10.0, 31.6, 100.0] {
            let state = ElectronState::from_voltage(constants, kv * 1e3)?;
            phis.push(phase_plate_delta_phi(&state, &spec));
        }
        let (lo, hi) = phis
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &p| {
                (l.min(p), h.max(p))
            });
        let phi_spread = (hi - lo) / lo.abs();

        let alpha = 0.5;
        let mut shifts = Vec::new();
        for scale in [1u32, 2, 4] {
            let reference = shared(dispersion_run(scale, 0.0))?;
            let pattern = shared(dispersion_run(scale, alpha))?;
            let shift =
                extract_fringe_shift(&pattern.0, &reference.0)? / pattern.0.fringe_spacing_hint;
            shifts.push((scale, shift));
        }
        let worst_shift = shifts
            .iter()
            .map(|&(_, s)| mod1(s - alpha))
            .fold(0.0f64, f64::max);

        // Arrival times compare on the fastest family member. The screen
        // centroid carries a kinematic bias, not a dynamical delay: a
        // shifted carrier puts weight on fringes sitting farther from the
        // slits, late by ~ (fringe spacing)^2 / flight distance, and that
        // bias shrinks quadratically with wavelength. The x4 run keeps it
        // well under the dynamical-delay budget being tested.
        let reference = shared(dispersion_run(4, 0.0))?;
        let flux_on = shared(dispersion_run(4, alpha))?;
        let delay = arrival_time_delay(&reference.1, &flux_on.1)?;
        let transit = reference.1.centroid_time;
        let delay_frac = (delay / transit).abs();

        let ok = phi_spread <= 1e-12 && worst_shift <= 0.02 && delay_frac <= 1e-3;
        Ok((ok, format!(
            "phase spread over 1-100 kV {phi_spread:.1e} (tol 1e-12); momentum-scaled shifts {:?} \
             worst miss {worst_shift:.4} (tol 0.02); arrival delay {delay_frac:.2e} of transit (tol 1e-3)",
            shifts
                .iter()
                .map(|&(k, s)| format!("x{k}: {s:+.4}"))
                .collect::<Vec<_>>()
        )))
    })())
}

/// Adding one whole flux quantum reproduces the same pattern, both in the
/// closed form and in the solver.
pub fn flux_periodicity() -> CriterionResult {
    finish(8, "flux periodicity", (|| {
        let state = beam_10kv()?;
        let geom = bench_slits()?;
        let fq = state.constants.flux_quantum;
        let quarter = two_slit_pattern(
            &geom,
            &state,
            phase_plate_delta_phi(&state, &bench_solenoid(0.25 * fq)?),
        );
        let plus_one = two_slit_pattern(
            &geom,
            &state,
            phase_plate_delta_phi(&state, &bench_solenoid(1.25 * fq)?),
        );
        let analytic =
            extract_fringe_shift(&plus_one, &quarter)?.abs() / quarter.fringe_spacing_hint;

        let angle = std::f64::consts::PI;
        let a = shared(desk_run(0.25, angle))?;
        let b = shared(desk_run(1.25, angle))?;
        let solver = extract_fringe_shift(&b.0, &a.0)?.abs() / a.0.fringe_spacing_hint;

        let ok = analytic <= 0.01 && solver <= 0.01;
        Ok((ok, format!(
            "pattern displacement from adding one flux quantum: closed form {analytic:.2e}, \
             solver {solver:.2e} fringes (tol 0.01)"
        )))
    })())
}

/// Free-space propagation: the split-step field matches the exact spreading
/// Gaussian pointwise, and with absorbers off the norm is conserved over
/// the full desk step budget.
pub fn free_packet_fidelity() -> CriterionResult {
    finish(9, "free propagation fidelity", (|| {
        let n = 256usize;
        let l = n as f64 * std::f64::consts::PI / 12.0;
        let sigma = 3.0;
        let k = Vec2::new(2.0, 0.0);
        let center = Vec2::new(0.0, 0.0);

        let grid = GridSpec::new(n, n, l, l, -l / 2.0, -l / 2.0, 0.0196, 100)?;
        let packet = initialize_packet(&grid, center, sigma, k)?;
        let mut engine = Engine::new(&grid, None);
        let mut psi = packet.amplitude.clone();
        for _ in 0..grid.step_count {
            engine.step(&mut psi);
        }
        let t = grid.dt * grid.step_count as f64;
        let mut max_err = 0.0f64;
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let exact =
                    analytic_free_gaussian(center, sigma, k, Vec2::new(grid.x(ix), grid.y(iy)), t);
                max_err = max_err.max((psi[iy * grid.nx + ix] - exact).norm());
            }
        }

        let long = GridSpec::new(n, n, l, l, -l / 2.0, -l / 2.0, 0.0196, 1070)?;
        let packet = initialize_packet(&long, center, sigma, k)?;
        let mut engine = Engine::new(&long, None);
        let mut psi = packet.amplitude;
        for _ in 0..long.step_count {
            engine.step(&mut psi);
        }
        let drift = (norm(&long, &psi) - 1.0).abs();

        let ok = max_err <= 1e-8 && drift <= 1e-10;
        Ok((ok, format!(
            "max pointwise error {max_err:.2e} after 100 steps (tol 1e-8); \
             norm drift {drift:.2e} after 1070 steps (tol 1e-10)"
        )))
    })())
}
