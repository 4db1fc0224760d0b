//! Split-step wavepacket propagation: the dynamical oracle.
//!
//! Everything in this module runs in solver units with hbar = m = 1, so
//! momentum and wavenumber coincide and the kinetic factor is exp(-i k^2
//! dt / 2). The analytic modules predict where the fringes land; this one
//! scatters an actual packet off a double slit with an enclosed flux line
//! and measures where they land.
//!
//! The enclosed flux enters as a fixed phase jump of 2 pi alpha across the
//! line through the solenoid along the string direction, applied to the
//! state once, when the propagation domain is constructed. With the string
//! aimed back through the central bar of the slit mask, the only amplitude
//! straddling the jump is amplitude the barrier is about to absorb, so the
//! encoding reproduces the exact homotopy phase assignment of paths around
//! the solenoid.

mod engine;
mod mask;
mod presets;

pub use engine::{
    arrival_time_delay, norm, run_experiment, run_experiment_observed, spectral_momentum,
    ArrivalRecord, Engine,
};
pub use mask::{ApparatusMask, MaskGeometry};
pub use presets::{desk, desk_with_string, dispersion, ExperimentPreset};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Periodic rectangular grid and the march parameters. Row-major storage,
/// x contiguous: index = iy * nx + ix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Domain lengths; cell sizes are lx/nx, ly/ny (last point excluded,
    /// periodic wrap).
    pub lx: f64,
    pub ly: f64,
    pub x_min: f64,
    pub y_min: f64,
    pub dt: f64,
    pub step_count: usize,
}

impl GridSpec {
    pub fn new(
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
        x_min: f64,
        y_min: f64,
        dt: f64,
        step_count: usize,
    ) -> Result<Self> {
        for (n, axis) in [(nx, "nx"), (ny, "ny")] {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::RejectedInput(format!(
                    "{axis} must be a power of two of at least 16, got {n}"
                )));
            }
        }
        for (v, what) in [(lx, "lx"), (ly, "ly"), (dt, "dt")] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::RejectedInput(format!(
                    "{what} must be positive and finite, got {v}"
                )));
            }
        }
        if !x_min.is_finite() || !y_min.is_finite() {
            return Err(Error::RejectedInput("grid origin must be finite".into()));
        }
        if step_count == 0 {
            return Err(Error::RejectedInput("step count must be positive".into()));
        }
        let grid = GridSpec {
            nx,
            ny,
            lx,
            ly,
            x_min,
            y_min,
            dt,
            step_count,
        };
        // Splitting contract: the largest kinetic phase advanced in one step
        // must stay below pi, or the spectral factor aliases.
        let reach = dt * grid.max_kinetic_eigenvalue();
        if reach > std::f64::consts::PI * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "time step {dt} advances the largest kinetic eigenvalue by {reach:.3} rad \
                 per step; the splitting contract requires at most pi"
            )));
        }
        Ok(grid)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + self.lx * ix as f64 / self.nx as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + self.ly * iy as f64 / self.ny as f64
    }

    /// Largest eigenvalue of -(1/2) laplacian resolvable on this grid:
    /// ((pi/dx)^2 + (pi/dy)^2) / 2.
    pub fn max_kinetic_eigenvalue(&self) -> f64 {
        let kx = std::f64::consts::PI / self.dx();
        let ky = std::f64::consts::PI / self.dy();
        0.5 * (kx * kx + ky * ky)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
}

/// Gaussian packet state on a grid.
#[derive(Clone, Debug)]
pub struct Wavepacket {
    pub amplitude: Vec<Complex64>,
    pub center: Vec2,
    pub width_sigma: f64,
    pub mean_momentum: Vec2,
}

/// Isotropic Gaussian, exp(-|r - center|^2 / (4 sigma^2) + i k . r),
/// normalized on the grid to unit probability.
pub fn initialize_packet(
    grid: &GridSpec,
    center: Vec2,
    sigma: f64,
    mean_momentum: Vec2,
) -> Result<Wavepacket> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::RejectedInput(format!(
            "packet width must be positive, got {sigma}"
        )));
    }
    let k = mean_momentum.norm();
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::RejectedInput(
            "packet needs a nonzero mean momentum".into(),
        ));
    }
    // Resolve the central de Broglie wavelength with at least 8 cells.
    let lambda = 2.0 * std::f64::consts::PI / k;
    let coarsest = grid.dx().max(grid.dy());
    if coarsest > lambda / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "grid spacing {coarsest:.4} undersamples the de Broglie wavelength \
             {lambda:.4}; need at least 8 cells per wavelength"
        )));
    }
    // The +-4 sigma support must sit inside the domain.
    let r = 4.0 * sigma;
    if center.x - r < grid.x_min
        || center.x + r > grid.x_min + grid.lx
        || center.y - r < grid.y_min
        || center.y + r > grid.y_min + grid.ly
    {
        return Err(Error::Precondition(format!(
            "packet support (4 sigma = {r}) is clipped by the domain boundary"
        )));
    }
    let mut amplitude = Vec::with_capacity(grid.len());
    let inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        let wy = y - center.y;
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            let wx = x - center.x;
            let envelope = (-(wx * wx + wy * wy) * inv4s2).exp();
            let phase = mean_momentum.x * x + mean_momentum.y * y;
            amplitude.push(Complex64::from_polar(envelope, phase));
        }
    }
    let total: f64 = norm(grid, &amplitude);
    let scale = 1.0 / total.sqrt();
    for a in &mut amplitude {
        *a *= scale;
    }
    Ok(Wavepacket {
        amplitude,
        center,
        width_sigma: sigma,
        mean_momentum,
    })
}

/// Two-lobe incident beam: a coherent, equal-weight sum of anisotropic
/// Gaussians centered at (center_x, +-lobe_offset), one aimed at each slit
/// aperture. Keeping the midline dark is what makes the flux jump line an
/// exact phase plate: the line crosses the beam where the density is
/// exponentially small, so the imprint carries no diffracting edge.
pub fn initialize_lobe_beam(
    grid: &GridSpec,
    center_x: f64,
    lobe_offset: f64,
    sigma_x: f64,
    sigma_y: f64,
    mean_momentum: Vec2,
) -> Result<Wavepacket> {
    for (label, s) in [("sigma_x", sigma_x), ("sigma_y", sigma_y)] {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::RejectedInput(format!(
                "beam {label} must be positive, got {s}"
            )));
        }
    }
    if !(lobe_offset.is_finite() && lobe_offset > 0.0) {
        return Err(Error::RejectedInput(format!(
            "lobe offset must be positive, got {lobe_offset}"
        )));
    }
    let k = mean_momentum.norm();
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::RejectedInput(
            "beam needs a nonzero mean momentum".into(),
        ));
    }
    let lambda = 2.0 * std::f64::consts::PI / k;
    let coarsest = grid.dx().max(grid.dy());
    if coarsest > lambda / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "grid spacing {coarsest:.4} undersamples the de Broglie wavelength \
             {lambda:.4}; need at least 8 cells per wavelength"
        )));
    }
    let rx = 4.0 * sigma_x;
    let ry = lobe_offset + 4.0 * sigma_y;
    if center_x - rx < grid.x_min
        || center_x + rx > grid.x_min + grid.lx
        || -ry < grid.y_min
        || ry > grid.y_min + grid.ly
    {
        return Err(Error::Precondition(
            "beam support (4 sigma past each lobe) is clipped by the domain boundary".into(),
        ));
    }
    let inv4sx2 = 1.0 / (4.0 * sigma_x * sigma_x);
    let inv4sy2 = 1.0 / (4.0 * sigma_y * sigma_y);
    let mut amplitude = Vec::with_capacity(grid.len());
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        let upper = y - lobe_offset;
        let lower = y + lobe_offset;
        let gy = (-upper * upper * inv4sy2).exp() + (-lower * lower * inv4sy2).exp();
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            let wx = x - center_x;
            let envelope = (-wx * wx * inv4sx2).exp() * gy;
            let phase = mean_momentum.x * x + mean_momentum.y * y;
            amplitude.push(Complex64::from_polar(envelope, phase));
        }
    }
    let total: f64 = norm(grid, &amplitude);
    let scale = 1.0 / total.sqrt();
    for a in &mut amplitude {
        *a *= scale;
    }
    Ok(Wavepacket {
        amplitude,
        center: Vec2::new(center_x, 0.0),
        width_sigma: sigma_y,
        mean_momentum,
    })
}

/// Closed-form free evolution of the same Gaussian, for validating the
/// propagator: psi(x, t) factorizes per axis into
/// (2 pi sigma^2)^(-1/4) sigma beta^(-1/2)
///   exp(-(x - x0 - k t)^2 / (4 beta) + i (k x - k^2 t / 2)),
/// with beta = sigma^2 + i t / 2.
pub fn analytic_free_gaussian(
    center: Vec2,
    sigma: f64,
    mean_momentum: Vec2,
    point: Vec2,
    t: f64,
) -> Complex64 {
    fn axis(x: f64, x0: f64, sigma: f64, k: f64, t: f64) -> Complex64 {
        let beta = Complex64::new(sigma * sigma, 0.5 * t);
        let front = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25) * sigma
            / beta.sqrt();
        let drifted = x - x0 - k * t;
        let arg = -Complex64::new(drifted * drifted, 0.0) / (4.0 * beta)
            + Complex64::new(0.0, k * x - 0.5 * k * k * t);
        front * arg.exp()
    }
    axis(point.x, center.x, sigma, mean_momentum.x, t)
        * axis(point.y, center.y, sigma, mean_momentum.y, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_grid() -> GridSpec {
        GridSpec::new(128, 128, 40.0, 40.0, -20.0, -20.0, 0.01, 10).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(100, 64, 40.0, 40.0, -20.0, -20.0, 0.01, 10).is_err());
        assert!(GridSpec::new(8, 64, 40.0, 40.0, -20.0, -20.0, 0.01, 10).is_err());
        assert!(GridSpec::new(64, 64, -1.0, 40.0, -20.0, -20.0, 0.01, 10).is_err());
        assert!(GridSpec::new(64, 64, 40.0, 40.0, -20.0, -20.0, 0.01, 0).is_err());
        // Stability contract: dt pushed past pi / max_eigenvalue is refused.
        let probe = GridSpec::new(64, 64, 40.0, 40.0, -20.0, -20.0, 1e-4, 10).unwrap();
        let dt_limit = std::f64::consts::PI / probe.max_kinetic_eigenvalue();
        assert!(matches!(
            GridSpec::new(64, 64, 40.0, 40.0, -20.0, -20.0, 1.01 * dt_limit, 10),
            Err(Error::Config(_))
        ));
        assert!(GridSpec::new(64, 64, 40.0, 40.0, -20.0, -20.0, 0.99 * dt_limit, 10).is_ok());
    }

    #[test]
    fn packet_is_normalized_and_centered() {
        let g = small_grid();
        let p = initialize_packet(&g, Vec2::new(-3.0, 2.0), 2.0, Vec2::new(2.0, 0.0)).unwrap();
        assert!((norm(&g, &p.amplitude) - 1.0).abs() < 1e-12);
        // Mean position from |psi|^2 lands on the requested center.
        let (mut mx, mut my) = (0.0, 0.0);
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let w = p.amplitude[iy * g.nx + ix].norm_sqr() * g.cell_area();
                mx += w * g.x(ix);
                my += w * g.y(iy);
            }
        }
        assert!((mx - -3.0).abs() < g.dx());
        assert!((my - 2.0).abs() < g.dy());
    }

    #[test]
    fn packet_spectral_momentum_matches_request() {
        let g = small_grid();
        let k = Vec2::new(2.0, -0.5);
        let p = initialize_packet(&g, Vec2::new(0.0, 0.0), 2.0, k).unwrap();
        let measured = spectral_momentum(&g, &p.amplitude);
        assert_relative_eq!(measured.x, k.x, max_relative = 1e-6);
        assert_relative_eq!(measured.y, k.y, max_relative = 1e-6);
    }

    #[test]
    fn clipped_or_unresolved_packets_are_refused() {
        let g = small_grid();
        // Support past the boundary.
        assert!(matches!(
            initialize_packet(&g, Vec2::new(-15.0, 0.0), 2.0, Vec2::new(2.0, 0.0)),
            Err(Error::Precondition(_))
        ));
        // Wavelength under 8 cells: k = 9 gives lambda = 0.70, dx = 0.3125.
        assert!(matches!(
            initialize_packet(&g, Vec2::ZERO, 2.0, Vec2::new(9.0, 0.0)),
            Err(Error::Config(_))
        ));
        assert!(initialize_packet(&g, Vec2::ZERO, -1.0, Vec2::new(2.0, 0.0)).is_err());
        assert!(initialize_packet(&g, Vec2::ZERO, 2.0, Vec2::ZERO).is_err());
    }

    #[test]
    fn analytic_gaussian_starts_at_the_initial_state() {
        let g = small_grid();
        let c = Vec2::new(-3.0, 2.0);
        let k = Vec2::new(2.0, 0.0);
        let p = initialize_packet(&g, c, 2.0, k).unwrap();
        let mut worst = 0.0f64;
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let a = analytic_free_gaussian(c, 2.0, k, Vec2::new(g.x(ix), g.y(iy)), 0.0);
                let d = (a - p.amplitude[iy * g.nx + ix]).norm();
                worst = worst.max(d);
            }
        }
        // Renormalization on the grid only touches the 15th digit.
        assert!(worst < 1e-12, "worst pointwise deviation {worst:.3e}");
    }
}
