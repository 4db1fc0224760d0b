//! Ideal-solenoid vector potential, its gauges, and gauge transformations.
//!
//! Everything here is in SI units: positions in meters, flux in webers,
//! vector potential in Wb/m, magnetic field in tesla.

use crate::error::{Error, Result};
use crate::geom::{Direction, Vec2};

/// An infinite ideal solenoid perpendicular to the plane.
///
/// The interior field is uniform with total flux `flux`; the exterior field
/// is zero while the exterior vector potential is not.
#[derive(Clone, Copy, Debug)]
pub struct SolenoidSpec {
    pub center: Vec2,
    /// Bore radius, m. Strictly positive.
    pub radius: f64,
    /// Total enclosed flux, Wb. Positive means field out of the plane.
    pub flux: f64,
}

impl SolenoidSpec {
    pub fn new(center: Vec2, radius: f64, flux: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::RejectedInput(format!(
                "solenoid radius must be positive and finite, got {radius}"
            )));
        }
        if !flux.is_finite() {
            return Err(Error::RejectedInput("solenoid flux must be finite".into()));
        }
        Ok(SolenoidSpec {
            center,
            radius,
            flux,
        })
    }

    /// Uniform interior field magnitude, tesla.
    pub fn interior_field(&self) -> f64 {
        self.flux / (std::f64::consts::PI * self.radius * self.radius)
    }
}

/// Gauge in which the vector potential is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gauge {
    /// Azimuthal gauge: A = Phi r / (2 pi R^2) inside, Phi / (2 pi r)
    /// outside, counterclockwise for positive flux.
    Symmetric,
    /// Symmetric gauge plus the gradient of a scalar that is smooth
    /// everywhere except on the ray from the center along `string_direction`.
    /// Evaluation on that ray is a singular-point error.
    StringOffset { string_direction: Direction },
}

/// Relative half-width used to decide that a point sits on a string ray.
const RAY_TOL: f64 = 1e-12;

fn symmetric_potential(spec: &SolenoidSpec, point: Vec2) -> Vec2 {
    let w = point - spec.center;
    let r2 = w.norm_sq();
    let rr = spec.radius * spec.radius;
    // Both branches agree at r = R, so the potential is continuous there.
    let scale = if r2 < rr {
        spec.flux / (2.0 * std::f64::consts::PI * rr)
    } else {
        spec.flux / (2.0 * std::f64::consts::PI * r2)
    };
    w.perp().scale(scale)
}

/// Gradient of the string scalar chi = (Phi / 2 pi) tanh(r/R) sin(|theta|/2),
/// with theta measured from the string direction. chi itself is continuous
/// everywhere; its gradient is bounded but has a direction kink on the ray,
/// which is where evaluation is refused.
fn string_gradient(spec: &SolenoidSpec, dir: Direction, point: Vec2) -> Result<Vec2> {
    let w = point - spec.center;
    let r = w.norm();
    if r == 0.0 {
        return Err(Error::SingularPoint(
            "string-offset gauge is singular at the solenoid center".into(),
        ));
    }
    let s = dir.vec();
    let u = w.dot(s);
    let v = w.cross(s); // = -(s x w): sign only matters through atan2 below
    let theta = f64::atan2(-v, u); // angle from the string direction, (-pi, pi]
    if u > 0.0 && v.abs() <= RAY_TOL * r {
        return Err(Error::SingularPoint(format!(
            "point ({}, {}) lies on the gauge string ray",
            point.x, point.y
        )));
    }
    let c0 = spec.flux / (2.0 * std::f64::consts::PI);
    let rho = r / spec.radius;
    let radial = c0 * (1.0 - rho.tanh().powi(2)) / spec.radius * (theta.abs() * 0.5).sin();
    let azimuthal = c0 * rho.tanh() * 0.5 * theta.signum() * (theta * 0.5).cos() / r;
    let r_hat = w.scale(1.0 / r);
    Ok(r_hat.scale(radial) + r_hat.perp().scale(azimuthal))
}

/// Vector potential of the solenoid at `point` in the requested gauge.
pub fn vector_potential(spec: &SolenoidSpec, gauge: &Gauge, point: Vec2) -> Result<Vec2> {
    match gauge {
        Gauge::Symmetric => Ok(symmetric_potential(spec, point)),
        Gauge::StringOffset { string_direction } => {
            let grad = string_gradient(spec, *string_direction, point)?;
            Ok(symmetric_potential(spec, point) + grad)
        }
    }
}

/// Out-of-plane magnetic field obtained as the numerical curl of the vector
/// potential, with a boundary flag when the stencil straddles r = R.
#[derive(Clone, Copy, Debug)]
pub struct BFieldSample {
    pub tesla: f64,
    /// True when the finite-difference stencil crosses the bore wall, where
    /// the second derivative of A jumps and the sample loses accuracy.
    pub boundary_straddle: bool,
}

pub const DEFAULT_CURL_STEP_FACTOR: f64 = 1e-4;

/// Numerical curl of A with the default step 1e-4 R.
pub fn magnetic_field(spec: &SolenoidSpec, gauge: &Gauge, point: Vec2) -> Result<BFieldSample> {
    magnetic_field_with_step(spec, gauge, point, DEFAULT_CURL_STEP_FACTOR * spec.radius)
}

pub fn magnetic_field_with_step(
    spec: &SolenoidSpec,
    gauge: &Gauge,
    point: Vec2,
    step: f64,
) -> Result<BFieldSample> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::RejectedInput(format!(
            "curl step must be positive and finite, got {step}"
        )));
    }
    let xp = point + Vec2::new(step, 0.0);
    let xm = point - Vec2::new(step, 0.0);
    let yp = point + Vec2::new(0.0, step);
    let ym = point - Vec2::new(0.0, step);
    let a_xp = vector_potential(spec, gauge, xp)?;
    let a_xm = vector_potential(spec, gauge, xm)?;
    let a_yp = vector_potential(spec, gauge, yp)?;
    let a_ym = vector_potential(spec, gauge, ym)?;
    let curl = (a_xp.y - a_xm.y) / (2.0 * step) - (a_yp.x - a_ym.x) / (2.0 * step);
    let radii = [xp, xm, yp, ym, point].map(|p| (p - spec.center).norm());
    let straddle = radii.iter().any(|&r| r < spec.radius) && radii.iter().any(|&r| r >= spec.radius);
    Ok(BFieldSample {
        tesla: curl,
        boundary_straddle: straddle,
    })
}

/// Where a gauge scalar is smooth (its gradient well defined).
#[derive(Clone, Copy, Debug)]
pub enum SmoothnessDomain {
    Everywhere,
    /// Smooth everywhere except the ray from `origin` along `direction`.
    OffRay { origin: Vec2, direction: Direction },
}

impl SmoothnessDomain {
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            SmoothnessDomain::Everywhere => true,
            SmoothnessDomain::OffRay { origin, direction } => {
                let w = p - *origin;
                let r = w.norm();
                if r == 0.0 {
                    return false;
                }
                let u = w.dot(direction.vec());
                let v = w.cross(direction.vec());
                !(u > 0.0 && v.abs() <= RAY_TOL * r)
            }
        }
    }
}

/// A scalar gauge function chi together with its smoothness domain.
/// Adding grad(chi) to a vector potential changes the gauge but not the
/// physics; the invariant curl(grad chi) = 0 holds on the smoothness domain.
pub struct GaugeFunction {
    chi: Box<dyn Fn(Vec2) -> f64 + Send + Sync>,
    pub smoothness: SmoothnessDomain,
}

impl GaugeFunction {
    pub fn new(
        chi: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
        smoothness: SmoothnessDomain,
    ) -> Self {
        GaugeFunction {
            chi: Box::new(chi),
            smoothness,
        }
    }

    pub fn constant(c: f64) -> Self {
        GaugeFunction::new(move |_| c, SmoothnessDomain::Everywhere)
    }

    /// chi = g . x, shifting the potential by the constant vector g.
    pub fn linear(gradient: Vec2) -> Self {
        GaugeFunction::new(move |p| gradient.dot(p), SmoothnessDomain::Everywhere)
    }

    /// The scalar that converts the symmetric gauge of `spec` into the
    /// string-offset gauge with the given string direction.
    pub fn string_offset(spec: &SolenoidSpec, string_direction: Direction) -> Self {
        let spec = *spec;
        let s = string_direction.vec();
        let chi = move |p: Vec2| {
            let w = p - spec.center;
            let r = w.norm();
            if r == 0.0 {
                return 0.0;
            }
            let theta = f64::atan2(-w.cross(s), w.dot(s));
            spec.flux / (2.0 * std::f64::consts::PI)
                * (r / spec.radius).tanh()
                * (theta.abs() * 0.5).sin()
        };
        GaugeFunction::new(
            chi,
            SmoothnessDomain::OffRay {
                origin: spec.center,
                direction: string_direction,
            },
        )
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        (self.chi)(p)
    }
}

/// Returns the field A + grad(chi), with the gradient taken by central
/// differences at the given step. Evaluation where chi is not smooth is a
/// singular-point error.
pub fn apply_gauge<'a, F>(
    field: F,
    chi: &'a GaugeFunction,
    step: f64,
) -> impl Fn(Vec2) -> Result<Vec2> + 'a
where
    F: Fn(Vec2) -> Result<Vec2> + 'a,
{
    move |p: Vec2| {
        if !chi.smoothness.contains(p) {
            return Err(Error::SingularPoint(format!(
                "gauge function is not smooth at ({}, {})",
                p.x, p.y
            )));
        }
        let a = field(p)?;
        let gx = (chi.eval(p + Vec2::new(step, 0.0)) - chi.eval(p - Vec2::new(step, 0.0)))
            / (2.0 * step);
        let gy = (chi.eval(p + Vec2::new(0.0, step)) - chi.eval(p - Vec2::new(0.0, step)))
            / (2.0 * step);
        Ok(a + Vec2::new(gx, gy))
    }
}
