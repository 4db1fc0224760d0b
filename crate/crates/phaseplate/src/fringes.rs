//! Two-slit fringe synthesis and sub-pixel shift measurement.
//!
//! A relative phase delta_phi between the arms slides the cosine carrier
//! under a stationary single-slit envelope: intensity goes as
//! sinc^2(pi a y / (lambda s)) * cos^2(pi d y / (lambda s) - delta_phi / 2).
//! The shift is measured from the phase of the carrier-frequency Fourier
//! component, which stays reliable at half-fringe displacements where peak
//! tracking turns ambiguous.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::ElectronState;

/// Double-slit layout. `slit_spacing` is center to center; the screen sits
/// `screen_distance` downstream.
#[derive(Clone, Copy, Debug)]
pub struct SlitGeometry {
    pub slit_spacing: f64,
    pub slit_width: f64,
    pub screen_distance: f64,
    /// Pattern is sampled on [-screen_half_extent, +screen_half_extent].
    pub screen_half_extent: f64,
    pub sample_count: usize,
}

impl SlitGeometry {
    pub fn new(
        slit_spacing: f64,
        slit_width: f64,
        screen_distance: f64,
        screen_half_extent: f64,
        sample_count: usize,
    ) -> Result<Self> {
        for (v, what) in [
            (slit_spacing, "slit spacing"),
            (slit_width, "slit width"),
            (screen_distance, "screen distance"),
            (screen_half_extent, "screen half-extent"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::RejectedInput(format!(
                    "{what} must be positive and finite, got {v}"
                )));
            }
        }
        if slit_width >= slit_spacing {
            return Err(Error::RejectedInput(format!(
                "slit width {slit_width} must be smaller than the spacing {slit_spacing}"
            )));
        }
        if sample_count < 16 {
            return Err(Error::RejectedInput(format!(
                "need at least 16 screen samples, got {sample_count}"
            )));
        }
        Ok(SlitGeometry {
            slit_spacing,
            slit_width,
            screen_distance,
            screen_half_extent,
            sample_count,
        })
    }

    /// True when d/s is large enough that the small-angle (Fraunhofer) form
    /// used here starts to strain. Flagged, never enforced.
    pub fn small_angle_strained(&self) -> bool {
        self.slit_spacing / self.screen_distance > 1e-2
    }

    /// Fringe period on the screen, lambda s / d.
    pub fn fringe_spacing(&self, state: &ElectronState) -> f64 {
        state.wavelength * self.screen_distance / self.slit_spacing
    }
}

/// Echo of the parameters a pattern was synthesized or measured with.
/// `delta_phi` is present only for synthetic patterns.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PatternMetadata {
    pub slit_spacing: f64,
    pub slit_width: f64,
    pub screen_distance: f64,
    pub wavelength: f64,
    pub delta_phi: Option<f64>,
    pub small_angle_strained: bool,
}

/// Sampled screen intensity with its carrier period.
#[derive(Clone, Debug)]
pub struct FringePattern {
    pub screen_positions: Vec<f64>,
    pub intensity: Vec<f64>,
    pub fringe_spacing_hint: f64,
    pub metadata: PatternMetadata,
}

impl FringePattern {
    /// Wrap externally measured samples (the wavepacket screen record uses
    /// this). Tiny negative intensities from roundoff are clamped to zero.
    pub fn from_samples(
        screen_positions: Vec<f64>,
        mut intensity: Vec<f64>,
        fringe_spacing_hint: f64,
        metadata: PatternMetadata,
    ) -> Result<Self> {
        if screen_positions.len() != intensity.len() || screen_positions.len() < 16 {
            return Err(Error::RejectedInput(format!(
                "pattern needs matching position/intensity arrays of at least 16 samples, \
                 got {} and {}",
                screen_positions.len(),
                intensity.len()
            )));
        }
        if !(fringe_spacing_hint.is_finite() && fringe_spacing_hint > 0.0) {
            return Err(Error::RejectedInput(format!(
                "fringe spacing hint must be positive, got {fringe_spacing_hint}"
            )));
        }
        let peak = intensity.iter().cloned().fold(0.0f64, f64::max);
        for v in &mut intensity {
            if !v.is_finite() || *v < -1e-12 * peak {
                return Err(Error::RejectedInput(format!(
                    "intensity samples must be finite and non-negative, got {v}"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(FringePattern {
            screen_positions,
            intensity,
            fringe_spacing_hint,
            metadata,
        })
    }

    /// Intensity smoothed over one fringe period (box average applied twice,
    /// a triangular kernel): the diffraction envelope with the carrier
    /// averaged out.
    pub fn smoothed_envelope(&self) -> Vec<f64> {
        let dy = self.screen_positions[1] - self.screen_positions[0];
        let window = ((self.fringe_spacing_hint / dy).round() as usize).max(1);
        box_smooth(&box_smooth(&self.intensity, window), window)
    }
}

fn box_smooth(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let half = window / 2;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let sum: f64 = values[lo..hi].iter().sum();
        out.push(sum / (hi - lo) as f64);
    }
    out
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Far-field two-slit pattern with arm phase difference `delta_phi` (upper
/// minus lower). The zero-phase pattern peaks at exactly 1 at y = 0; the
/// envelope never moves with delta_phi, only the carrier under it.
pub fn two_slit_pattern(
    geom: &SlitGeometry,
    state: &ElectronState,
    delta_phi: f64,
) -> FringePattern {
    let n = geom.sample_count;
    let h = geom.screen_half_extent;
    let lam_s = state.wavelength * geom.screen_distance;
    let env_k = std::f64::consts::PI * geom.slit_width / lam_s;
    let car_k = std::f64::consts::PI * geom.slit_spacing / lam_s;
    let mut screen_positions = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    for i in 0..n {
        let y = -h + 2.0 * h * i as f64 / (n - 1) as f64;
        let envelope = sinc(env_k * y);
        let carrier = (car_k * y - 0.5 * delta_phi).cos();
        screen_positions.push(y);
        intensity.push(envelope * envelope * carrier * carrier);
    }
    FringePattern {
        screen_positions,
        intensity,
        fringe_spacing_hint: geom.fringe_spacing(state),
        metadata: PatternMetadata {
            slit_spacing: geom.slit_spacing,
            slit_width: geom.slit_width,
            screen_distance: geom.screen_distance,
            wavelength: state.wavelength,
            delta_phi: Some(delta_phi),
            small_angle_strained: geom.small_angle_strained(),
        },
    }
}

/// Fringe displacement produced by enclosed flux:
/// delta_y = s (lambda / d) (e / h) Phi, i.e. (delta_phi / 2 pi) fringe
/// spacings with delta_phi = e Phi / hbar.
pub fn fringe_shift_prediction(geom: &SlitGeometry, state: &ElectronState, flux_wb: f64) -> f64 {
    geom.screen_distance * state.wavelength / geom.slit_spacing * state.constants.e
        / state.constants.h
        * flux_wb
}

/// Carrier-frequency Fourier projection, windowed by the shared envelope.
fn carrier_projection(intensity: &[f64], positions: &[f64], window: &[f64], spacing: f64)
    -> (Complex64, f64)
{
    let k = 2.0 * std::f64::consts::PI / spacing;
    let mut z = Complex64::new(0.0, 0.0);
    let mut dc = 0.0;
    for ((&v, &y), &w) in intensity.iter().zip(positions).zip(window) {
        z += Complex64::from_polar(w * v, -k * y);
        dc += w * v;
    }
    (z, dc)
}

/// Minimum carrier-to-mean amplitude ratio before a pattern counts as
/// fringeless. A clean two-slit pattern sits near 0.5.
const CONTRAST_FLOOR: f64 = 0.05;

/// Sub-pixel displacement of `pattern` relative to `reference`, positive
/// toward +y, defined modulo one fringe spacing (result in plus or minus
/// half a spacing). Grids must match sample for sample.
pub fn extract_fringe_shift(pattern: &FringePattern, reference: &FringePattern) -> Result<f64> {
    if pattern.screen_positions != reference.screen_positions {
        return Err(Error::Precondition(
            "patterns must share the same screen grid".into(),
        ));
    }
    let spacing = reference.fringe_spacing_hint;
    if (pattern.fringe_spacing_hint - spacing).abs() > 1e-9 * spacing {
        return Err(Error::Precondition(
            "patterns must share the same fringe spacing".into(),
        ));
    }
    // One shared window keeps windowing phase errors common-mode.
    let window = reference.smoothed_envelope();
    let (z_p, dc_p) = carrier_projection(
        &pattern.intensity,
        &pattern.screen_positions,
        &window,
        spacing,
    );
    let (z_r, dc_r) = carrier_projection(
        &reference.intensity,
        &reference.screen_positions,
        &window,
        spacing,
    );
    for (z, dc, which) in [(z_p, dc_p, "pattern"), (z_r, dc_r, "reference")] {
        if !(z.norm() > CONTRAST_FLOOR * dc) {
            return Err(Error::LowContrast(format!(
                "{which} has no usable carrier component \
                 (relative amplitude {:.2e})",
                if dc > 0.0 { z.norm() / dc } else { 0.0 }
            )));
        }
    }
    // A pattern displaced by +dy carries carrier phase -2 pi dy / spacing.
    let relative_phase = (z_p * z_r.conj()).arg();
    Ok(-relative_phase / (2.0 * std::f64::consts::PI) * spacing)
}

/// Centroid of the smoothed envelope: the quantity that must not move when
/// the arm phase changes.
pub fn envelope_centroid(pattern: &FringePattern) -> f64 {
    let env = pattern.smoothed_envelope();
    let mut num = 0.0;
    let mut den = 0.0;
    for (&w, &y) in env.iter().zip(&pattern.screen_positions) {
        num += w * y;
        den += w;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;
    use approx::assert_relative_eq;

    // 10 kV beam through micron-scale slits, metre-scale camera length:
    // fringe spacing 12 um, envelope first null at 44 um.
    fn geom() -> SlitGeometry {
        SlitGeometry::new(1.0e-6, 0.28e-6, 1.0, 1.3e-4, 2049).unwrap()
    }

    fn state() -> ElectronState {
        ElectronState::from_voltage(PhysicalConstants::electron(), 1.0e4).unwrap()
    }

    /// |a - b| up to a whole number of fringes, the natural metric for a
    /// quantity defined modulo the spacing.
    fn circular_distance(a: f64, b: f64, spacing: f64) -> f64 {
        let d = (a - b) / spacing;
        (d - d.round()).abs() * spacing
    }

    #[test]
    fn geometry_validation() {
        assert!(SlitGeometry::new(1e-6, 2e-6, 1.0, 1e-4, 100).is_err());
        assert!(SlitGeometry::new(1e-6, 1e-6, 1.0, 1e-4, 100).is_err());
        assert!(SlitGeometry::new(1e-6, -1e-7, 1.0, 1e-4, 100).is_err());
        assert!(SlitGeometry::new(1e-6, 1e-7, 0.0, 1e-4, 100).is_err());
        assert!(SlitGeometry::new(1e-6, 1e-7, 1.0, 1e-4, 15).is_err());
        assert!(!geom().small_angle_strained());
        let tight = SlitGeometry::new(1e-6, 1e-7, 5e-5, 1e-4, 100).unwrap();
        assert!(tight.small_angle_strained());
    }

    #[test]
    fn zero_phase_pattern_is_symmetric_with_unit_peak_at_center() {
        let p = two_slit_pattern(&geom(), &state(), 0.0);
        let n = p.intensity.len();
        // Odd sample count puts y = 0 on the grid.
        assert_eq!(p.screen_positions[n / 2], 0.0);
        assert_eq!(p.intensity[n / 2], 1.0);
        for i in 0..n {
            assert!(p.intensity[i] <= 1.0);
            assert!((p.intensity[i] - p.intensity[n - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pi_phase_interchanges_bright_and_dark() {
        let g = geom();
        let s = state();
        let p = two_slit_pattern(&g, &s, std::f64::consts::PI);
        let n = p.intensity.len();
        // Dark at the center where the zero-phase pattern peaks.
        assert!(p.intensity[n / 2] < 1e-25);
        // Brightest sample sits half a fringe from the center.
        let spacing = g.fringe_spacing(&s);
        let dy = p.screen_positions[1] - p.screen_positions[0];
        let (imax, _) = p
            .intensity
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!((p.screen_positions[imax].abs() - 0.5 * spacing).abs() < 2.0 * dy);
    }

    #[test]
    fn two_pi_phase_reproduces_zero_phase_pattern() {
        let g = geom();
        let s = state();
        let a = two_slit_pattern(&g, &s, 0.0);
        let b = two_slit_pattern(&g, &s, 2.0 * std::f64::consts::PI);
        for (x, y) in a.intensity.iter().zip(&b.intensity) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn predicted_shift_counts_flux_in_fringe_spacings() {
        let g = geom();
        let s = state();
        let c = s.constants;
        let spacing = g.fringe_spacing(&s);
        assert_eq!(fringe_shift_prediction(&g, &s, 0.0), 0.0);
        assert_relative_eq!(
            fringe_shift_prediction(&g, &s, c.flux_quantum),
            spacing,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fringe_shift_prediction(&g, &s, 0.5 * c.flux_quantum),
            0.5 * spacing,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fringe_shift_prediction(&g, &s, -0.25 * c.flux_quantum),
            -0.25 * spacing,
            max_relative = 1e-12
        );
    }

    #[test]
    fn extraction_of_self_is_zero() {
        let g = geom();
        let s = state();
        let r = two_slit_pattern(&g, &s, 0.0);
        let shift = extract_fringe_shift(&r, &r).unwrap();
        assert!(shift.abs() < 1e-6 * g.fringe_spacing(&s));
    }

    #[test]
    fn extraction_recovers_analytic_shifts_to_a_percent() {
        let g = geom();
        let s = state();
        let spacing = g.fringe_spacing(&s);
        let r = two_slit_pattern(&g, &s, 0.0);
        for (dphi, frac) in [
            (0.2, 0.2 / (2.0 * std::f64::consts::PI)),
            (std::f64::consts::PI, 0.5),
            (-1.0, -1.0 / (2.0 * std::f64::consts::PI)),
            (2.0, 2.0 / (2.0 * std::f64::consts::PI)),
        ] {
            let p = two_slit_pattern(&g, &s, dphi);
            let got = extract_fringe_shift(&p, &r).unwrap();
            assert!(
                circular_distance(got, frac * spacing, spacing) < 0.01 * spacing,
                "delta_phi {dphi}: got {got:.3e}, want {:.3e}",
                frac * spacing
            );
        }
    }

    #[test]
    fn measured_shift_closes_the_loop_with_the_prediction() {
        let g = geom();
        let s = state();
        let c = s.constants;
        let spacing = g.fringe_spacing(&s);
        let r = two_slit_pattern(&g, &s, 0.0);
        for i in 0..20 {
            let flux = (-1.0 + 2.0 * i as f64 / 19.0) * c.flux_quantum;
            let dphi = c.e * flux / c.hbar;
            let measured = extract_fringe_shift(&two_slit_pattern(&g, &s, dphi), &r).unwrap();
            let predicted = fringe_shift_prediction(&g, &s, flux);
            assert!(
                circular_distance(measured, predicted, spacing) < 0.01 * spacing,
                "flux {flux:.3e}: measured {measured:.3e}, predicted {predicted:.3e}"
            );
        }
    }

    #[test]
    fn envelope_centroid_ignores_the_arm_phase() {
        let g = geom();
        let s = state();
        let spacing = g.fringe_spacing(&s);
        let base = envelope_centroid(&two_slit_pattern(&g, &s, 0.0));
        for i in 1..8 {
            let dphi = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
            let c = envelope_centroid(&two_slit_pattern(&g, &s, dphi));
            assert!(
                (c - base).abs() < 1e-3 * spacing,
                "delta_phi {dphi}: centroid moved {:+.3e}",
                c - base
            );
        }
    }

    #[test]
    fn extracted_shift_is_linear_in_flux() {
        let g = geom();
        let s = state();
        let c = s.constants;
        let r = two_slit_pattern(&g, &s, 0.0);
        // Stay inside half a fringe so no unwrapping enters the fit.
        let mut sum_xy = 0.0;
        let mut sum_xx = 0.0;
        for i in 0..21 {
            let flux = (-0.4 + 0.8 * i as f64 / 20.0) * c.flux_quantum;
            let dphi = c.e * flux / c.hbar;
            let shift = extract_fringe_shift(&two_slit_pattern(&g, &s, dphi), &r).unwrap();
            sum_xy += flux * shift;
            sum_xx += flux * flux;
        }
        let slope = sum_xy / sum_xx;
        let expected = g.screen_distance * s.wavelength * c.e / (g.slit_spacing * c.h);
        assert_relative_eq!(slope, expected, max_relative = 1e-2);
    }

    #[test]
    fn peak_tracking_cross_checks_the_carrier_phase() {
        // Parabolic refinement of the central peak: coarser than the carrier
        // method but independent of it.
        let g = geom();
        let s = state();
        let spacing = g.fringe_spacing(&s);
        let p = two_slit_pattern(&g, &s, 0.6);
        let n = p.intensity.len();
        let center = n / 2;
        let quarter = (spacing / (p.screen_positions[1] - p.screen_positions[0]) / 2.0) as usize;
        let (mut imax, mut vmax) = (center, p.intensity[center]);
        for i in center - quarter..=center + quarter {
            if p.intensity[i] > vmax {
                imax = i;
                vmax = p.intensity[i];
            }
        }
        let (ym, y0, yp) = (
            p.intensity[imax - 1],
            p.intensity[imax],
            p.intensity[imax + 1],
        );
        let dy = p.screen_positions[1] - p.screen_positions[0];
        let refined = p.screen_positions[imax]
            + 0.5 * dy * (ym - yp) / (ym - 2.0 * y0 + yp);
        let predicted = 0.6 / (2.0 * std::f64::consts::PI) * spacing;
        assert!((refined - predicted).abs() < 0.01 * spacing);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g = geom();
        let s = state();
        let a = two_slit_pattern(&g, &s, 0.0);
        let other = SlitGeometry::new(1.0e-6, 0.28e-6, 1.0, 1.2e-4, 2049).unwrap();
        let b = two_slit_pattern(&other, &s, 0.0);
        assert!(matches!(
            extract_fringe_shift(&b, &a),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fringeless_input_reports_low_contrast() {
        let g = geom();
        let s = state();
        let r = two_slit_pattern(&g, &s, 0.0);
        let flat = FringePattern::from_samples(
            r.screen_positions.clone(),
            vec![1.0; r.intensity.len()],
            r.fringe_spacing_hint,
            r.metadata,
        )
        .unwrap();
        assert!(matches!(
            extract_fringe_shift(&flat, &r),
            Err(Error::LowContrast(_))
        ));
    }

    #[test]
    fn sample_wrapping_validates_inputs() {
        let meta = PatternMetadata {
            slit_spacing: 1.0,
            slit_width: 0.3,
            screen_distance: 10.0,
            wavelength: 0.1,
            delta_phi: None,
            small_angle_strained: false,
        };
        assert!(FringePattern::from_samples(vec![0.0; 8], vec![1.0; 8], 1.0, meta).is_err());
        assert!(FringePattern::from_samples(vec![0.0; 20], vec![1.0; 19], 1.0, meta).is_err());
        assert!(
            FringePattern::from_samples(vec![0.0; 20], vec![-1.0; 20], 1.0, meta).is_err()
        );
        assert!(FringePattern::from_samples(vec![0.0; 20], vec![1.0; 20], 0.0, meta).is_err());
    }
}
