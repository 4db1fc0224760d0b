//! Strang-split propagator: half a damping factor, an exact spectral
//! kinetic step, half a damping factor. The kinetic factor separates per
//! axis, so each step is two batched FFT passes with a transpose between.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fringes::{FringePattern, PatternMetadata};
use crate::geom::Vec2;

use super::mask::{ApparatusMask, MaskGeometry};
use super::{GridSpec, Wavepacket};

pub struct Engine {
    grid: GridSpec,
    /// exp(-Gamma dt / 2) per cell; None propagates freely.
    damp_half: Option<Vec<f64>>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    /// Kinetic factors exp(-i k^2 dt / 2); the inverse-transform 1/n scaling
    /// is folded in.
    kin_x: Vec<Complex64>,
    kin_y: Vec<Complex64>,
    tbuf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

/// Signed spectral wavenumber for row index i of n samples over length l.
fn wavenumber(i: usize, n: usize, l: f64) -> f64 {
    let m = if i < n / 2 {
        i as isize
    } else {
        i as isize - n as isize
    };
    2.0 * std::f64::consts::PI * m as f64 / l
}

impl Engine {
    pub fn new(grid: &GridSpec, mask: Option<&ApparatusMask>) -> Engine {
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(grid.nx);
        let inv_x = planner.plan_fft_inverse(grid.nx);
        let fwd_y = planner.plan_fft_forward(grid.ny);
        let inv_y = planner.plan_fft_inverse(grid.ny);
        let kin = |n: usize, l: f64| -> Vec<Complex64> {
            (0..n)
                .map(|i| {
                    let k = wavenumber(i, n, l);
                    Complex64::from_polar(1.0 / n as f64, -0.5 * k * k * grid.dt)
                })
                .collect()
        };
        let kin_x = kin(grid.nx, grid.lx);
        let kin_y = kin(grid.ny, grid.ly);
        let scratch_len = fwd_x
            .get_inplace_scratch_len()
            .max(inv_x.get_inplace_scratch_len())
            .max(fwd_y.get_inplace_scratch_len())
            .max(inv_y.get_inplace_scratch_len());
        let damp_half = mask.map(|m| {
            m.loss_rate
                .iter()
                .map(|&g| (-0.5 * g * grid.dt).exp())
                .collect()
        });
        Engine {
            grid: *grid,
            damp_half,
            fwd_x,
            inv_x,
            fwd_y,
            inv_y,
            kin_x,
            kin_y,
            tbuf: vec![Complex64::new(0.0, 0.0); grid.len()],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), self.grid.len());
        if let Some(d) = &self.damp_half {
            for (p, &f) in psi.iter_mut().zip(d.iter()) {
                *p *= f;
            }
        }
        self.fwd_x.process_with_scratch(psi, &mut self.scratch);
        for row in psi.chunks_exact_mut(self.grid.nx) {
            for (v, &k) in row.iter_mut().zip(self.kin_x.iter()) {
                *v *= k;
            }
        }
        self.inv_x.process_with_scratch(psi, &mut self.scratch);
        transpose::transpose(psi, &mut self.tbuf, self.grid.nx, self.grid.ny);
        self.fwd_y.process_with_scratch(&mut self.tbuf, &mut self.scratch);
        for col in self.tbuf.chunks_exact_mut(self.grid.ny) {
            for (v, &k) in col.iter_mut().zip(self.kin_y.iter()) {
                *v *= k;
            }
        }
        self.inv_y.process_with_scratch(&mut self.tbuf, &mut self.scratch);
        transpose::transpose(&self.tbuf, psi, self.grid.ny, self.grid.nx);
        if let Some(d) = &self.damp_half {
            for (p, &f) in psi.iter_mut().zip(d.iter()) {
                *p *= f;
            }
        }
    }
}

/// Grid probability, compensated summation so the 1e-10 conservation
/// contract is not eaten by accumulation error on large grids.
pub fn norm(grid: &GridSpec, psi: &[Complex64]) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for a in psi {
        let term = a.norm_sqr() - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum * grid.cell_area()
}

/// First spectral moment of |psi-hat|^2, the measured mean momentum.
pub fn spectral_momentum(grid: &GridSpec, psi: &[Complex64]) -> Vec2 {
    let mut planner = FftPlanner::new();
    let fwd_x = planner.plan_fft_forward(grid.nx);
    let fwd_y = planner.plan_fft_forward(grid.ny);
    let mut data = psi.to_vec();
    let mut scratch = vec![
        Complex64::new(0.0, 0.0);
        fwd_x
            .get_inplace_scratch_len()
            .max(fwd_y.get_inplace_scratch_len())
    ];
    fwd_x.process_with_scratch(&mut data, &mut scratch);
    let mut tbuf = vec![Complex64::new(0.0, 0.0); grid.len()];
    transpose::transpose(&data, &mut tbuf, grid.nx, grid.ny);
    fwd_y.process_with_scratch(&mut tbuf, &mut scratch);
    let mut weight = 0.0;
    let mut kx_sum = 0.0;
    let mut ky_sum = 0.0;
    for ix in 0..grid.nx {
        let kx = wavenumber(ix, grid.nx, grid.lx);
        for iy in 0..grid.ny {
            let w = tbuf[ix * grid.ny + iy].norm_sqr();
            weight += w;
            kx_sum += w * kx;
            ky_sum += w * wavenumber(iy, grid.ny, grid.ly);
        }
    }
    Vec2::new(kx_sum / weight, ky_sum / weight)
}

/// Propagation summary at the screen column.
#[derive(Clone, Debug)]
pub struct ArrivalRecord {
    /// Flux-weighted centroid of the arrival-time distribution.
    pub centroid_time: f64,
    /// Estimated probability that crossed the screen during the run.
    pub crossing_probability: f64,
    pub flux_fraction: f64,
    family: RunFamily,
}

/// Everything two runs must share before their arrival times compare:
/// the enclosed flux is the only free knob.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RunFamily {
    grid: GridSpec,
    geometry: MaskGeometry,
    packet_center: Vec2,
    packet_sigma: f64,
    packet_momentum: Vec2,
    screen_column: usize,
}

/// Difference of centroid arrival times, `later` minus `earlier`, provided
/// the two runs differ in nothing but the enclosed flux.
pub fn arrival_time_delay(earlier: &ArrivalRecord, later: &ArrivalRecord) -> Result<f64> {
    if earlier.family != later.family {
        return Err(Error::Precondition(
            "arrival times compare only between runs that differ solely in the enclosed flux"
                .into(),
        ));
    }
    Ok(later.centroid_time - earlier.centroid_time)
}

/// March the packet through the mask for the grid's full step budget,
/// accumulating time-integrated probability on the screen column.
pub fn run_experiment(
    grid: &GridSpec,
    mask: &ApparatusMask,
    packet: &Wavepacket,
    screen_x: f64,
) -> Result<(FringePattern, ArrivalRecord)> {
    run_experiment_observed(grid, mask, packet, screen_x, &mut |_, _| Ok(()))
}

/// Like [`run_experiment`], invoking `observe` with the 1-based step index
/// and the full field after every step. An observer error aborts the run.
pub fn run_experiment_observed(
    grid: &GridSpec,
    mask: &ApparatusMask,
    packet: &Wavepacket,
    screen_x: f64,
    observe: &mut dyn FnMut(usize, &[Complex64]) -> Result<()>,
) -> Result<(FringePattern, ArrivalRecord)> {
    if packet.amplitude.len() != grid.len() || mask.loss_rate.len() != grid.len() {
        return Err(Error::Precondition(
            "packet, mask and grid sizes disagree".into(),
        ));
    }
    let g = &mask.geometry;
    let col = ((screen_x - grid.x_min) / grid.dx()).round();
    if !(col.is_finite() && col >= 0.0 && col < grid.nx as f64) {
        return Err(Error::Precondition(format!(
            "screen position {screen_x} is off the grid"
        )));
    }
    let col = col as usize;
    let x_col = grid.x(col);
    let (_, x_interior_hi) = mask.interior_x_range(grid);
    if x_col <= g.barrier_x + 0.5 * g.barrier_width + 2.0 * grid.dx() {
        return Err(Error::Precondition(format!(
            "screen at x = {x_col:.3} is not downstream of the barrier"
        )));
    }
    if x_col >= x_interior_hi - 2.0 * grid.dx() {
        return Err(Error::Precondition(format!(
            "screen at x = {x_col:.3} sits inside the boundary absorber"
        )));
    }

    let mut engine = Engine::new(grid, Some(mask));
    let mut psi = packet.amplitude.clone();
    for (p, &k) in psi.iter_mut().zip(mask.kick.iter()) {
        *p *= k;
    }

    let mut screen = vec![0.0f64; grid.ny];
    let mut flux = Vec::with_capacity(grid.step_count);
    let dy = grid.dy();
    for s in 0..grid.step_count {
        engine.step(&mut psi);
        let mut p = 0.0;
        for iy in 0..grid.ny {
            let w = psi[iy * grid.nx + col].norm_sqr();
            screen[iy] += w;
            p += w;
        }
        flux.push(p * dy);
        observe(s + 1, &psi)?;
    }

    let speed = packet.mean_momentum.norm();
    let dt = grid.dt;
    let total: f64 = flux.iter().sum::<f64>() * dt;
    // A packet of unit norm crossing at speed v deposits total ~ 1/v; less
    // than ~0.1% of that means the packet never made it.
    if total * speed < 1e-3 {
        return Err(Error::IncompleteRun(format!(
            "only {:.2e} of the packet reached the screen; increase the step count \
             or move the screen closer",
            total * speed
        )));
    }
    let peak = flux.iter().cloned().fold(0.0f64, f64::max);
    let tail_len = (grid.step_count / 20).max(1);
    let tail_mean: f64 =
        flux[grid.step_count - tail_len..].iter().sum::<f64>() / tail_len as f64;
    if tail_mean > 0.05 * peak {
        return Err(Error::IncompleteRun(
            "packet is still crossing the screen at the end of the run; \
             increase the step count"
                .into(),
        ));
    }
    let weighted: f64 = flux
        .iter()
        .enumerate()
        .map(|(i, p)| (i + 1) as f64 * dt * p)
        .sum();
    let centroid_time = weighted / flux.iter().sum::<f64>();

    // Crop the readout to the absorber-free interior.
    let (y_lo, y_hi) = mask.interior_y_range(grid);
    let (y_lo, y_hi) = (y_lo + 2.0 * dy, y_hi - 2.0 * dy);
    let mut positions = Vec::new();
    let mut intensity = Vec::new();
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        if y >= y_lo && y <= y_hi {
            positions.push(y);
            intensity.push(screen[iy]);
        }
    }
    let peak_i = intensity.iter().cloned().fold(0.0f64, f64::max);
    if peak_i > 0.0 {
        for v in &mut intensity {
            *v /= peak_i;
        }
    }

    let wavelength = 2.0 * std::f64::consts::PI / speed;
    let span = x_col - g.barrier_x;
    let hint = wavelength * span / g.slit_spacing;
    let metadata = PatternMetadata {
        slit_spacing: g.slit_spacing,
        slit_width: g.slit_width,
        screen_distance: span,
        wavelength,
        delta_phi: None,
        small_angle_strained: g.slit_spacing / span > 1e-2,
    };
    let pattern = FringePattern::from_samples(positions, intensity, hint, metadata)?;

    let mut family_geometry = *g;
    family_geometry.flux_fraction = 0.0;
    let record = ArrivalRecord {
        centroid_time,
        crossing_probability: total * speed,
        flux_fraction: g.flux_fraction,
        family: RunFamily {
            grid: *grid,
            geometry: family_geometry,
            packet_center: packet.center,
            packet_sigma: packet.width_sigma,
            packet_momentum: packet.mean_momentum,
            screen_column: col,
        },
    };
    Ok((pattern, record))
}

#[cfg(test)]
mod tests {
    use super::super::{analytic_free_gaussian, initialize_packet};
    use super::*;

    const L: f64 = 67.020643276582255; // 256 cells of pi/12

    fn free_grid(steps: usize) -> GridSpec {
        GridSpec::new(256, 256, L, L, -L / 2.0, -L / 2.0, 0.0196, steps).unwrap()
    }

    #[test]
    fn free_packet_tracks_the_analytic_gaussian() {
        let grid = free_grid(100);
        let center = Vec2::new(-5.0, 0.0);
        let k = Vec2::new(3.0, 0.0);
        // sigma = 3 keeps the periodic images of the packet below 1e-12 at
        // the boundary; the comparison is then limited by roundoff alone.
        let packet = initialize_packet(&grid, center, 3.0, k).unwrap();
        let mut engine = Engine::new(&grid, None);
        let mut psi = packet.amplitude.clone();
        for _ in 0..grid.step_count {
            engine.step(&mut psi);
        }
        let t = grid.step_count as f64 * grid.dt;
        let mut worst = 0.0f64;
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let exact =
                    analytic_free_gaussian(center, 3.0, k, Vec2::new(grid.x(ix), grid.y(iy)), t);
                worst = worst.max((exact - psi[iy * grid.nx + ix]).norm());
            }
        }
        assert!(worst < 1e-8, "max pointwise deviation {worst:.3e}");
        assert!((norm(&grid, &psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_is_conserved_without_absorbers() {
        let grid = free_grid(400);
        let packet =
            initialize_packet(&grid, Vec2::new(-5.0, 0.0), 4.0, Vec2::new(3.0, 0.0)).unwrap();
        let mut engine = Engine::new(&grid, None);
        let mut psi = packet.amplitude.clone();
        for _ in 0..grid.step_count {
            engine.step(&mut psi);
        }
        assert!(
            (norm(&grid, &psi) - 1.0).abs() < 1e-10,
            "norm drift {:.3e}",
            (norm(&grid, &psi) - 1.0).abs()
        );
    }

    fn plain_geometry() -> MaskGeometry {
        MaskGeometry {
            barrier_x: 0.0,
            barrier_width: 1.6,
            slit_spacing: 9.0,
            slit_width: 2.5,
            barrier_rate: 45.0,
            absorber_frac: 0.10,
            absorber_rate: 15.0,
            solenoid: Vec2::new(4.0, 0.0),
            shield_radius: 1.2,
            flux_fraction: 0.0,
            string_angle: std::f64::consts::PI,
        }
    }

    #[test]
    fn norm_never_grows_under_absorption() {
        let grid = free_grid(300);
        let mut geometry = plain_geometry();
        geometry.barrier_rate = 0.0;
        geometry.flux_fraction = 0.3;
        let mask = ApparatusMask::build(&grid, &geometry).unwrap();
        // Aim the packet into the upper absorber.
        let packet =
            initialize_packet(&grid, Vec2::new(-5.0, 10.0), 3.0, Vec2::new(0.0, 3.0)).unwrap();
        let mut engine = Engine::new(&grid, Some(&mask));
        let mut psi = packet.amplitude.clone();
        let mut prev = norm(&grid, &psi);
        let mut absorbed_something = false;
        for _ in 0..grid.step_count {
            engine.step(&mut psi);
            let n = norm(&grid, &psi);
            assert!(n <= prev + 1e-13, "norm grew from {prev} to {n}");
            if n < prev - 1e-6 {
                absorbed_something = true;
            }
            prev = n;
        }
        assert!(absorbed_something);
        assert!(prev < 0.9);
    }

    #[test]
    fn string_is_invisible_where_the_packet_vanishes() {
        // All loss rates off; the only difference between the runs is the
        // phase jump across the string line, which lies 10 sigma away (and
        // 12 sigma from the periodic wrap of the kicked half-plane).
        let grid = free_grid(100);
        let mut geometry = plain_geometry();
        geometry.barrier_rate = 0.0;
        geometry.absorber_rate = 0.0;
        let run = |alpha: f64| -> Vec<Complex64> {
            let mut geo = geometry;
            geo.flux_fraction = alpha;
            let mask = ApparatusMask::build(&grid, &geo).unwrap();
            let packet =
                initialize_packet(&grid, Vec2::new(-10.0, -15.0), 1.5, Vec2::new(3.0, 0.0))
                    .unwrap();
            let mut psi = packet.amplitude.clone();
            for (p, &k) in psi.iter_mut().zip(mask.kick.iter()) {
                *p *= k;
            }
            let mut engine = Engine::new(&grid, Some(&mask));
            for _ in 0..grid.step_count {
                engine.step(&mut psi);
            }
            psi
        };
        let with_flux = run(0.8);
        let without = run(0.0);
        let worst = with_flux
            .iter()
            .zip(without.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "states differ by {worst:.3e}");
    }

    #[test]
    fn screen_placement_is_validated() {
        let grid = free_grid(100);
        let mask = ApparatusMask::build(&grid, &plain_geometry()).unwrap();
        let packet =
            initialize_packet(&grid, Vec2::new(-10.0, 0.0), 3.0, Vec2::new(3.0, 0.0)).unwrap();
        // Upstream of the barrier.
        assert!(matches!(
            run_experiment(&grid, &mask, &packet, -5.0),
            Err(Error::Precondition(_))
        ));
        // Inside the boundary absorber.
        assert!(matches!(
            run_experiment(&grid, &mask, &packet, 31.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    #[ignore = "timing probe, run on demand"]
    fn bench_desk_step() {
        let preset = super::super::presets::desk(0.0);
        let mask = ApparatusMask::build(&preset.grid, &preset.geometry).unwrap();
        let packet = preset.beam().unwrap();
        let mut engine = Engine::new(&preset.grid, Some(&mask));
        let mut psi = packet.amplitude.clone();
        let start = std::time::Instant::now();
        let probe_steps = 30;
        for _ in 0..probe_steps {
            engine.step(&mut psi);
        }
        let per_step = start.elapsed().as_secs_f64() / probe_steps as f64;
        println!(
            "desk step: {:.1} ms, full run ({} steps): {:.1} s",
            per_step * 1e3,
            preset.grid.step_count,
            per_step * preset.grid.step_count as f64
        );
    }

    #[test]
    fn truncated_runs_are_reported_incomplete() {
        let grid = GridSpec::new(256, 256, L, L, -L / 2.0, -L / 2.0, 0.0196, 120).unwrap();
        let mask = ApparatusMask::build(&grid, &plain_geometry()).unwrap();
        let packet =
            initialize_packet(&grid, Vec2::new(-11.0, 0.0), 3.0, Vec2::new(3.0, 0.0)).unwrap();
        assert!(matches!(
            run_experiment(&grid, &mask, &packet, 15.0),
            Err(Error::IncompleteRun(_))
        ));
    }
}
