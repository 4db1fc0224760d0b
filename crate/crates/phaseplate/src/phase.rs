//! Electron kinematics in a vector potential and the phase plate built on them.
//!
//! The canonical momentum of a beam electron is fixed by the gun; inside a
//! region with vector potential A the mechanical momentum along the beam is
//! p = p_o - e A_par, so the local de Broglie wavelength stretches or
//! compresses. The ratio p/p_o acts as a refractive index for matter waves,
//! and a solenoid between two paths acts as a bidirectional phase plate:
//! one path sees the index raised, the other lowered, by the same amount.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::fields::{vector_potential, Gauge, SolenoidSpec};
use crate::geom::{Direction, Vec2};
use crate::quad;

/// Beam electron, nonrelativistic. All four kinematic fields are kept
/// mutually consistent by the constructors: p = sqrt(2 m E), lambda = h / p,
/// k = 2 pi / lambda.
#[derive(Clone, Copy, Debug)]
pub struct ElectronState {
    pub constants: PhysicalConstants,
    /// Kinetic energy, J.
    pub energy: f64,
    /// Canonical momentum magnitude, kg m/s.
    pub momentum: f64,
    /// Free-space de Broglie wavelength, m.
    pub wavelength: f64,
    /// Free-space wavenumber 2 pi / lambda, 1/m.
    pub wavenumber: f64,
}

fn require_positive(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::RejectedInput(format!(
            "{what} must be positive and finite, got {value}"
        )))
    }
}

impl ElectronState {
    pub fn from_energy(constants: PhysicalConstants, energy_joules: f64) -> Result<Self> {
        let energy = require_positive(energy_joules, "kinetic energy")?;
        let momentum = (2.0 * constants.m * energy).sqrt();
        Ok(Self::assemble(constants, energy, momentum))
    }

    /// Accelerating voltage in volts; the electron picks up E = e V.
    pub fn from_voltage(constants: PhysicalConstants, volts: f64) -> Result<Self> {
        let volts = require_positive(volts, "accelerating voltage")?;
        Self::from_energy(constants, constants.e * volts)
    }

    pub fn from_momentum(constants: PhysicalConstants, momentum_si: f64) -> Result<Self> {
        let momentum = require_positive(momentum_si, "momentum")?;
        let energy = momentum * momentum / (2.0 * constants.m);
        Ok(Self::assemble(constants, energy, momentum))
    }

    pub fn from_wavelength(constants: PhysicalConstants, wavelength_m: f64) -> Result<Self> {
        let wavelength = require_positive(wavelength_m, "wavelength")?;
        Self::from_momentum(constants, constants.h / wavelength)
    }

    fn assemble(constants: PhysicalConstants, energy: f64, momentum: f64) -> Self {
        let wavelength = constants.h / momentum;
        let wavenumber = 2.0 * std::f64::consts::PI / wavelength;
        Self {
            constants,
            energy,
            momentum,
            wavelength,
            wavenumber,
        }
    }
}

/// Magnitude of the mechanical momentum along `direction` when the local
/// vector potential is `a`: |p_o - e (A . dir)|.
pub fn mechanical_momentum(state: &ElectronState, a: Vec2, direction: Direction) -> f64 {
    let a_par = a.dot(direction.vec());
    (state.momentum - state.constants.e * a_par).abs()
}

/// Local de Broglie wavelength h / |p_o - e A_par|. Fails if the potential
/// cancels the momentum exactly: the wavelength diverges there.
pub fn de_broglie_wavelength(state: &ElectronState, a: Vec2, direction: Direction) -> Result<f64> {
    let p = mechanical_momentum(state, a, direction);
    if p == 0.0 {
        return Err(Error::DegenerateState(
            "vector potential cancels the beam momentum; wavelength diverges".into(),
        ));
    }
    Ok(state.constants.h / p)
}

/// Quantum refractive index n_q = |p_o - e A_par| / p_o = lambda_o / lambda.
/// Unity in free space; linear in A_par while e A_par < p_o.
pub fn quantum_refractive_index(state: &ElectronState, a: Vec2, direction: Direction) -> f64 {
    mechanical_momentum(state, a, direction) / state.momentum
}

/// Index difference between the two arms, lower minus upper, from the signed
/// parallel components of A on each arm: e (a_lower - a_upper) / p_o.
/// A common offset to both arms (a gauge shift) drops out.
pub fn delta_n_q(state: &ElectronState, a_upper_par: f64, a_lower_par: f64) -> f64 {
    state.constants.e * (a_lower_par - a_upper_par) / state.momentum
}

/// The solenoid seen as a refractive element between the two arms.
#[derive(Clone, Copy, Debug)]
pub struct PhasePlateModel {
    /// Interaction length L_i = 2 pi R: the two half-circumferences combined.
    pub interaction_length: f64,
    /// Per-arm thickness t_i = pi R, exactly half the interaction length.
    pub plate_thickness: f64,
    /// Index on the arm running against the potential (raised for flux > 0).
    pub qri_upper: f64,
    /// Index on the arm running with the potential.
    pub qri_lower: f64,
    /// qri_lower - qri_upper.
    pub delta_n_q: f64,
}

/// Evaluate both arm indices at the solenoid wall, where |A| = Phi / (2 pi R).
/// The upper arm moves antiparallel to A there, the lower arm parallel.
pub fn phase_plate_model(state: &ElectronState, spec: &SolenoidSpec) -> PhasePlateModel {
    let plate_thickness = std::f64::consts::PI * spec.radius;
    let interaction_length = 2.0 * plate_thickness;
    let a_theta = spec.flux / interaction_length;
    let e = state.constants.e;
    let qri_upper = (state.momentum + e * a_theta).abs() / state.momentum;
    let qri_lower = (state.momentum - e * a_theta).abs() / state.momentum;
    PhasePlateModel {
        interaction_length,
        plate_thickness,
        qri_upper,
        qri_lower,
        delta_n_q: qri_lower - qri_upper,
    }
}

/// Arm phase difference (upper minus lower) accumulated across the plate:
/// (e / hbar) L_i A_theta = (e / hbar) Phi. Independent of the electron
/// state, which is why the shift it produces is non-dispersive.
pub fn phase_plate_delta_phi(state: &ElectronState, spec: &SolenoidSpec) -> f64 {
    let interaction_length = 2.0 * std::f64::consts::PI * spec.radius;
    let a_theta = spec.flux / interaction_length;
    state.constants.e / state.constants.hbar * interaction_length * a_theta
}

/// Piecewise-linear integration path. Closed paths own an implicit edge from
/// the last vertex back to the first.
#[derive(Clone, Debug)]
pub struct PolylinePath {
    points: Vec<Vec2>,
    closed: bool,
}

impl PolylinePath {
    pub fn open(points: Vec<Vec2>) -> Result<Self> {
        Self::validate(&points, 2)?;
        Ok(Self {
            points,
            closed: false,
        })
    }

    pub fn closed(mut points: Vec<Vec2>) -> Result<Self> {
        // A trailing repeat of the first vertex is the same loop; drop it.
        if points.len() > 1 && points[points.len() - 1] == points[0] {
            points.pop();
        }
        Self::validate(&points, 3)?;
        if points[points.len() - 1] == points[0] {
            return Err(Error::RejectedInput(
                "closed path endpoints coincide after normalization".into(),
            ));
        }
        Ok(Self {
            points,
            closed: true,
        })
    }

    fn validate(points: &[Vec2], min_len: usize) -> Result<()> {
        if points.len() < min_len {
            return Err(Error::RejectedInput(format!(
                "path needs at least {min_len} vertices, got {}",
                points.len()
            )));
        }
        for p in points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::RejectedInput("path vertex is not finite".into()));
            }
        }
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::RejectedInput(
                    "consecutive path vertices coincide".into(),
                ));
            }
        }
        Ok(())
    }

    /// Regular polygon approximation of a circle, `segments` vertices per
    /// revolution, `turns` full revolutions (negative = clockwise).
    pub fn circle(center: Vec2, radius: f64, segments: usize, turns: i32) -> Result<Self> {
        if segments < 3 {
            return Err(Error::RejectedInput(
                "circle path needs at least 3 segments per turn".into(),
            ));
        }
        if turns == 0 {
            return Err(Error::RejectedInput("circle path needs turns != 0".into()));
        }
        let radius = require_positive(radius, "circle path radius")?;
        let n = segments * turns.unsigned_abs() as usize;
        let sweep = 2.0 * std::f64::consts::PI * turns as f64;
        let points = (0..n)
            .map(|j| {
                let theta = sweep * j as f64 / n as f64;
                Vec2::new(
                    center.x + radius * theta.cos(),
                    center.y + radius * theta.sin(),
                )
            })
            .collect();
        Self::closed(points)
    }

    /// Axis-aligned square traversed counterclockwise.
    pub fn square(center: Vec2, half_side: f64) -> Result<Self> {
        let h = require_positive(half_side, "square path half-side")?;
        Self::closed(vec![
            Vec2::new(center.x + h, center.y - h),
            Vec2::new(center.x + h, center.y + h),
            Vec2::new(center.x - h, center.y + h),
            Vec2::new(center.x - h, center.y - h),
        ])
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.points
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let wrap = if self.closed {
            Some((self.points[self.points.len() - 1], self.points[0]))
        } else {
            None
        };
        self.points
            .windows(2)
            .map(|w| (w[0], w[1]))
            .chain(wrap)
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Signed number of times a closed path encircles `p` (counterclockwise
    /// positive), by counting signed horizontal-ray crossings.
    pub fn winding_number(&self, p: Vec2) -> Result<i32> {
        if !self.closed {
            return Err(Error::Precondition(
                "winding number is defined for closed paths only".into(),
            ));
        }
        let mut w = 0;
        for (a, b) in self.edges() {
            let orient = (b - a).cross(p - a);
            if a.y <= p.y {
                if b.y > p.y && orient > 0.0 {
                    w += 1;
                }
            } else if b.y <= p.y && orient < 0.0 {
                w -= 1;
            }
        }
        Ok(w)
    }
}

const QUAD_REL_TOL: f64 = 1e-11;

/// Parameter in (0, 1) where the segment a->b crosses the gauge string ray,
/// if it does. The string-offset potential has a direction kink there;
/// integrating each side separately keeps the quadrature from bisecting its
/// way onto the ray itself.
fn string_crossing(spec: &SolenoidSpec, gauge: &Gauge, a: Vec2, b: Vec2) -> Option<f64> {
    let Gauge::StringOffset { string_direction } = gauge else {
        return None;
    };
    let s = string_direction.vec();
    let va = (a - spec.center).cross(s);
    let vb = (b - spec.center).cross(s);
    // Endpoints exactly on the string line are left alone: quadrature nodes
    // are strictly interior, so they never evaluate there.
    if va == 0.0 || vb == 0.0 || va.signum() == vb.signum() {
        return None;
    }
    let t = va / (va - vb);
    let p = Vec2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
    ((p - spec.center).dot(s) > 0.0).then_some(t)
}

/// Line integral of A . dl along the path, in Wb. Segment evaluation errors
/// (a node landing on a gauge string) propagate out.
fn potential_line_integral(
    spec: &SolenoidSpec,
    gauge: &Gauge,
    path: &PolylinePath,
) -> Result<f64> {
    let abs_floor = 1e-14 * spec.flux.abs();
    let mut total = 0.0;
    for (a, b) in path.edges() {
        let chord = b - a;
        let integrand = |t: f64| -> Result<f64> {
            let point = Vec2::new(a.x + chord.x * t, a.y + chord.y * t);
            Ok(vector_potential(spec, gauge, point)?.dot(chord))
        };
        match string_crossing(spec, gauge, a, b) {
            Some(t) if t > 0.0 && t < 1.0 => {
                total += quad::adaptive(&integrand, 0.0, t, QUAD_REL_TOL, 0.5 * abs_floor)?;
                total += quad::adaptive(&integrand, t, 1.0, QUAD_REL_TOL, 0.5 * abs_floor)?;
            }
            _ => total += quad::adaptive(&integrand, 0.0, 1.0, QUAD_REL_TOL, abs_floor)?,
        }
    }
    Ok(total)
}

/// Phase (e / hbar) * closed-loop integral of A . dl, in radians. Equals
/// (e / hbar) * Phi * winding_number for any loop and any gauge.
pub fn ab_phase_loop(
    state: &ElectronState,
    spec: &SolenoidSpec,
    gauge: &Gauge,
    path: &PolylinePath,
) -> Result<f64> {
    if !path.is_closed() {
        return Err(Error::Precondition(
            "loop phase requires a closed path".into(),
        ));
    }
    let flux_seen = potential_line_integral(spec, gauge, path)?;
    Ok(state.constants.e / state.constants.hbar * flux_seen)
}

/// Loop phase on an exact circular arc of `turns` revolutions, integrated in
/// the angle parameter rather than along chords. No polygon discretization
/// error, so this is the reference the polyline version is checked against.
pub fn ab_phase_circle(
    state: &ElectronState,
    spec: &SolenoidSpec,
    gauge: &Gauge,
    center: Vec2,
    radius: f64,
    turns: i32,
) -> Result<f64> {
    let radius = require_positive(radius, "circle radius")?;
    if turns == 0 {
        return Err(Error::RejectedInput("circle loop needs turns != 0".into()));
    }
    let at = |theta: f64| {
        let (s, c) = theta.sin_cos();
        Vec2::new(center.x + radius * c, center.y + radius * s)
    };
    let integrand = |theta: f64| -> Result<f64> {
        let (s, c) = theta.sin_cos();
        // dl = r (-sin, cos) dtheta
        let tangent = Vec2::new(-radius * s, radius * c);
        Ok(vector_potential(spec, gauge, at(theta))?.dot(tangent))
    };
    let sweep = 2.0 * std::f64::consts::PI * turns as f64;
    let (lo, hi) = if sweep >= 0.0 { (0.0, sweep) } else { (sweep, 0.0) };
    let sign = if sweep >= 0.0 { 1.0 } else { -1.0 };
    // Break the sweep at gauge-string crossings, same reasoning as for
    // polyline edges: smooth one-sided pieces keep the refinement shallow.
    let mut breaks = vec![lo];
    if let Gauge::StringOffset { string_direction } = gauge {
        let s_vec = string_direction.vec();
        let v_of = |theta: f64| (at(theta) - spec.center).cross(s_vec);
        let n = 256 * turns.unsigned_abs() as usize;
        for j in 0..n {
            let t0 = lo + (hi - lo) * j as f64 / n as f64;
            let t1 = lo + (hi - lo) * (j + 1) as f64 / n as f64;
            let (mut a, mut b) = (t0, t1);
            let (va, vb) = (v_of(a), v_of(b));
            if va == 0.0 || vb == 0.0 || va.signum() == vb.signum() {
                continue;
            }
            for _ in 0..64 {
                let m = 0.5 * (a + b);
                if v_of(m).signum() == v_of(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let root = 0.5 * (a + b);
            if (at(root) - spec.center).dot(s_vec) > 0.0 {
                breaks.push(root);
            }
        }
    }
    breaks.push(hi);
    let abs_floor = 1e-14 * spec.flux.abs() / (breaks.len() - 1) as f64;
    let mut flux_seen = 0.0;
    for w in breaks.windows(2) {
        flux_seen += quad::adaptive(&integrand, w[0], w[1], 1e-12, abs_floor)?;
    }
    Ok(state.constants.e / state.constants.hbar * sign * flux_seen)
}

/// Phase accumulated along an arbitrary (open or closed) path. Open-path
/// values are gauge dependent; only differences between paths with shared
/// endpoints, or closed loops, are observable.
pub fn path_phase(
    state: &ElectronState,
    spec: &SolenoidSpec,
    gauge: &Gauge,
    path: &PolylinePath,
) -> Result<f64> {
    let flux_seen = potential_line_integral(spec, gauge, path)?;
    Ok(state.constants.e / state.constants.hbar * flux_seen)
}
