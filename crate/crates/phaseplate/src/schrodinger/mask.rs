//! Loss-rate fields for the double slit, the boundary absorbers and the
//! solenoid shield, plus the one-shot phase kick that encodes the flux.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::Vec2;

use super::GridSpec;

/// Everything that shapes the propagation domain, in solver units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskGeometry {
    /// Center plane of the barrier slab.
    pub barrier_x: f64,
    pub barrier_width: f64,
    /// Center-to-center slit distance and single-slit opening, both along y,
    /// slits symmetric about y = 0.
    pub slit_spacing: f64,
    pub slit_width: f64,
    /// Loss rate on solid barrier material and on the solenoid shield disk.
    pub barrier_rate: f64,
    /// Fraction of each domain length given to the boundary absorbers
    /// (applied on all four sides).
    pub absorber_frac: f64,
    pub absorber_rate: f64,
    pub solenoid: Vec2,
    pub shield_radius: f64,
    /// Enclosed flux in units of the flux quantum.
    pub flux_fraction: f64,
    /// Direction of the phase-string ray leaving the solenoid, radians.
    pub string_angle: f64,
}

/// Grid-sampled loss rates and the flux phase factor. `loss_rate` is the
/// total imaginary-potential rate Gamma(r); the propagator turns it into
/// per-half-step damping factors. `kick` carries exp(i 2 pi alpha) on the
/// side of the string line where the upper slit sits and 1 on the other.
pub struct ApparatusMask {
    pub geometry: MaskGeometry,
    pub loss_rate: Vec<f64>,
    pub kick: Vec<Complex64>,
}

/// Cubic smoothstep clamped to [0, 1].
fn smooth(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

impl ApparatusMask {
    pub fn build(grid: &GridSpec, geometry: &MaskGeometry) -> Result<Self> {
        let g = *geometry;
        if !(g.slit_width.is_finite() && g.slit_width > 0.0 && g.slit_spacing > g.slit_width) {
            return Err(Error::RejectedInput(format!(
                "slit spacing {} must exceed slit width {} and both must be positive",
                g.slit_spacing, g.slit_width
            )));
        }
        if !(g.barrier_width.is_finite() && g.barrier_width >= 4.0 * grid.dx()) {
            return Err(Error::RejectedInput(format!(
                "barrier width {} must span at least 4 cells ({})",
                g.barrier_width,
                4.0 * grid.dx()
            )));
        }
        for (v, what) in [
            (g.barrier_rate, "barrier loss rate"),
            (g.absorber_rate, "absorber loss rate"),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::RejectedInput(format!(
                    "{what} must be nonnegative, got {v}"
                )));
            }
        }
        if !(g.absorber_frac >= 0.0 && g.absorber_frac < 0.4) {
            return Err(Error::RejectedInput(format!(
                "absorber fraction {} out of range [0, 0.4)",
                g.absorber_frac
            )));
        }
        if !(g.shield_radius.is_finite() && g.shield_radius > 0.0) {
            return Err(Error::RejectedInput("shield radius must be positive".into()));
        }
        if !g.flux_fraction.is_finite() || !g.string_angle.is_finite() {
            return Err(Error::RejectedInput(
                "flux fraction and string angle must be finite".into(),
            ));
        }
        // The shield must stay clear of the slit openings.
        let inner_edge = 0.5 * (g.slit_spacing - g.slit_width);
        if g.solenoid.y.abs() + g.shield_radius >= inner_edge {
            return Err(Error::RejectedInput(
                "solenoid shield overlaps a slit aperture".into(),
            ));
        }
        Self::validate_string(grid, &g)?;

        let smooth_x = 2.0 * grid.dx();
        let smooth_y = 2.0 * grid.dy();
        let half_bar = 0.5 * g.barrier_width;
        let half_slit = 0.5 * g.slit_width;
        let centers = [0.5 * g.slit_spacing, -0.5 * g.slit_spacing];
        let x_lo = grid.x_min;
        let x_hi = grid.x_min + grid.lx;
        let y_lo = grid.y_min;
        let y_hi = grid.y_min + grid.ly;
        let wx = g.absorber_frac * grid.lx;
        let wy = g.absorber_frac * grid.ly;

        let string = Vec2::new(g.string_angle.cos(), g.string_angle.sin());
        let kick_factor = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * g.flux_fraction,
        );

        let mut loss_rate = Vec::with_capacity(grid.len());
        let mut kick = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            // Openness of the slit plane at this height: 1 in a slit center,
            // 0 on solid bar, smoothed over two cells.
            let mut open = 0.0;
            for c in centers {
                open += smooth((y - (c - half_slit)) / smooth_y)
                    * smooth(((c + half_slit) - y) / smooth_y);
            }
            for ix in 0..grid.nx {
                let x = grid.x(ix);
                let slab = smooth((x - (g.barrier_x - half_bar)) / smooth_x)
                    * smooth(((g.barrier_x + half_bar) - x) / smooth_x);
                let mut rate = g.barrier_rate * slab * (1.0 - open.min(1.0));

                // Boundary absorbers: cubic ramps over the outer fraction.
                let mut ramp: f64 = 0.0;
                if wx > 0.0 {
                    let into_lo = ((x_lo + wx) - x) / wx;
                    let into_hi = (x - (x_hi - wx)) / wx;
                    ramp = ramp.max(into_lo.clamp(0.0, 1.0).powi(3));
                    ramp = ramp.max(into_hi.clamp(0.0, 1.0).powi(3));
                }
                if wy > 0.0 {
                    let into_lo = ((y_lo + wy) - y) / wy;
                    let into_hi = (y - (y_hi - wy)) / wy;
                    ramp = ramp.max(into_lo.clamp(0.0, 1.0).powi(3));
                    ramp = ramp.max(into_hi.clamp(0.0, 1.0).powi(3));
                }
                // Corners take the max of the x and y ramps, not the sum.
                rate += g.absorber_rate * ramp;

                let w = Vec2::new(x - g.solenoid.x, y - g.solenoid.y);
                rate += g.barrier_rate * smooth((g.shield_radius - w.norm()) / smooth_x);

                loss_rate.push(rate);
                kick.push(if w.cross(string) > 0.0 {
                    kick_factor
                } else {
                    Complex64::new(1.0, 0.0)
                });
            }
        }
        Ok(ApparatusMask {
            geometry: g,
            loss_rate,
            kick,
        })
    }

    /// The phase jump of the kick field must fall where the barrier absorbs:
    /// the string ray has to leave the solenoid toward the slit plane and
    /// cross it on the central bar, clear of both apertures.
    fn validate_string(grid: &GridSpec, g: &MaskGeometry) -> Result<()> {
        let dir = Vec2::new(g.string_angle.cos(), g.string_angle.sin());
        let back_face = g.barrier_x + 0.5 * g.barrier_width;
        if g.solenoid.x <= back_face {
            return Err(Error::RejectedInput(
                "solenoid must sit downstream of the barrier".into(),
            ));
        }
        if dir.x >= -1e-9 {
            return Err(Error::RejectedInput(
                "phase string must point back toward the slit plane".into(),
            ));
        }
        let t = (g.barrier_x - g.solenoid.x) / dir.x;
        let y_cross = g.solenoid.y + t * dir.y;
        let bar_half = 0.5 * (g.slit_spacing - g.slit_width);
        let margin = 2.0 * grid.dy();
        if y_cross.abs() > bar_half - margin {
            return Err(Error::RejectedInput(format!(
                "phase string crosses the slit plane at y = {y_cross:.3}, outside the \
                 central bar (|y| < {:.3})",
                bar_half - margin
            )));
        }
        Ok(())
    }

    /// Interior bounds (exclusive of the absorber ramps), useful for
    /// cropping screen readouts.
    pub fn interior_y_range(&self, grid: &GridSpec) -> (f64, f64) {
        let wy = self.geometry.absorber_frac * grid.ly;
        (grid.y_min + wy, grid.y_min + grid.ly - wy)
    }

    pub fn interior_x_range(&self, grid: &GridSpec) -> (f64, f64) {
        let wx = self.geometry.absorber_frac * grid.lx;
        (grid.x_min + wx, grid.x_min + grid.lx - wx)
    }
}
