//! Physical constants and the mapping between SI quantities and the
//! solver's natural units (hbar = m = 1).

use crate::error::{Error, Result};

/// Fundamental constants in SI units. `h` and `e` are primary (the exact
/// SI-2019 defined values); `hbar` and `flux_quantum` are derived from them
/// at construction so the identities hold to the last bit.
#[derive(Clone, Copy, Debug)]
pub struct PhysicalConstants {
    /// Planck constant, J s.
    pub h: f64,
    /// Elementary charge, C. The carrier is modeled with charge +e; the
    /// sign convention only fixes the direction of the fringe shift.
    pub e: f64,
    /// Particle mass, kg.
    pub m: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Flux quantum h/e, Wb. One quantum of enclosed flux advances the
    /// interference phase by exactly 2 pi.
    pub flux_quantum: f64,
}

impl PhysicalConstants {
    /// Electron in SI units.
    pub fn electron() -> Self {
        let h = 6.626_070_15e-34;
        let e = 1.602_176_634e-19;
        let m = 9.109_383_701_5e-31;
        PhysicalConstants {
            h,
            e,
            m,
            hbar: h / (2.0 * std::f64::consts::PI),
            flux_quantum: h / e,
        }
    }
}

/// Dimension tag for unit conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Energy,
    Momentum,
    /// Magnetic flux expressed internally as the interference phase it
    /// produces (radians): one flux quantum maps to 2 pi.
    FluxFraction,
}

impl std::str::FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(Dimension::Length),
            "time" => Ok(Dimension::Time),
            "energy" => Ok(Dimension::Energy),
            "momentum" => Ok(Dimension::Momentum),
            "flux-fraction" => Ok(Dimension::FluxFraction),
            other => Err(Error::RejectedInput(format!(
                "unknown dimension tag {other:?}"
            ))),
        }
    }
}

/// Conversion factors between SI and internal units with hbar = m = 1.
///
/// Fixing the length scale determines everything else:
/// time_scale = m length_scale^2 / hbar and energy_scale = hbar / time_scale.
#[derive(Clone, Copy, Debug)]
pub struct UnitScale {
    pub constants: PhysicalConstants,
    /// Meters per internal length unit.
    pub length_scale: f64,
    /// Seconds per internal time unit.
    pub time_scale: f64,
    /// Joules per internal energy unit.
    pub energy_scale: f64,
}

impl UnitScale {
    pub fn from_length_scale(constants: PhysicalConstants, length_scale: f64) -> Result<Self> {
        if !(length_scale.is_finite() && length_scale > 0.0) {
            return Err(Error::RejectedInput(format!(
                "length scale must be positive and finite, got {length_scale}"
            )));
        }
        let time_scale = constants.m * length_scale * length_scale / constants.hbar;
        let energy_scale = constants.hbar / time_scale;
        Ok(UnitScale {
            constants,
            length_scale,
            time_scale,
            energy_scale,
        })
    }

    fn si_per_internal(&self, dim: Dimension) -> f64 {
        let c = &self.constants;
        match dim {
            Dimension::Length => self.length_scale,
            Dimension::Time => self.time_scale,
            Dimension::Energy => self.energy_scale,
            // Internal momentum equals the internal wavenumber, so one
            // internal unit is hbar / length_scale in kg m/s.
            Dimension::Momentum => c.hbar / self.length_scale,
            // Internal flux is the phase e Phi / hbar in radians.
            Dimension::FluxFraction => c.hbar / c.e,
        }
    }

    pub fn to_internal(&self, quantity_si: f64, dim: Dimension) -> f64 {
        quantity_si / self.si_per_internal(dim)
    }

    pub fn from_internal(&self, quantity_internal: f64, dim: Dimension) -> f64 {
        quantity_internal * self.si_per_internal(dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scale() -> UnitScale {
        UnitScale::from_length_scale(PhysicalConstants::electron(), 1e-9).unwrap()
    }

    #[test]
    fn derived_constants_match_primaries_to_one_ulp() {
        let c = PhysicalConstants::electron();
        assert_eq!(c.hbar, c.h / (2.0 * std::f64::consts::PI));
        assert_eq!(c.flux_quantum, c.h / c.e);
        // CODATA cross-checks.
        assert!((c.hbar - 1.054_571_817e-34).abs() / c.hbar < 1e-9);
        assert!((c.flux_quantum - 4.135_667_696e-15).abs() / c.flux_quantum < 1e-9);
    }

    #[test]
    fn scale_relations_hold() {
        let s = scale();
        let c = &s.constants;
        // hbar = m = 1 internally pins both relations.
        assert!((s.energy_scale * s.time_scale / c.hbar - 1.0).abs() < 1e-14);
        assert!(
            (s.length_scale * s.length_scale * c.m / (c.hbar * s.time_scale) - 1.0).abs() < 1e-14
        );
    }

    #[test]
    fn one_length_scale_maps_to_unity() {
        let s = scale();
        assert_eq!(s.to_internal(s.length_scale, Dimension::Length), 1.0);
        assert_eq!(s.to_internal(0.0, Dimension::Energy), 0.0);
        assert_eq!(s.from_internal(1.0, Dimension::Length), s.length_scale);
    }

    #[test]
    fn momentum_maps_via_wavenumber() {
        let s = scale();
        let p = 5.40e-23;
        let expected = p * s.length_scale / s.constants.hbar;
        let got = s.to_internal(p, Dimension::Momentum);
        assert!((got - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn one_flux_quantum_is_two_pi_internally() {
        let s = scale();
        let c = &s.constants;
        let internal = s.to_internal(c.flux_quantum, Dimension::FluxFraction);
        assert!((internal - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let phi = s.from_internal(2.0 * std::f64::consts::PI, Dimension::FluxFraction);
        assert!((phi - 4.135_667_696e-15).abs() / phi < 1e-9);
    }

    #[test]
    fn dimension_tags_parse_and_reject() {
        use std::str::FromStr;
        assert_eq!(Dimension::from_str("length").unwrap(), Dimension::Length);
        assert_eq!(
            Dimension::from_str("flux-fraction").unwrap(),
            Dimension::FluxFraction
        );
        assert!(Dimension::from_str("charge").is_err());
    }

    proptest! {
        // Round trips across six decades and every dimension tag.
        #[test]
        fn round_trip_is_exact_to_1e14(
            mantissa in 1.0f64..10.0,
            decade in -3i32..=3,
            dim_idx in 0usize..5,
        ) {
            let dims = [
                Dimension::Length,
                Dimension::Time,
                Dimension::Energy,
                Dimension::Momentum,
                Dimension::FluxFraction,
            ];
            let s = scale();
            let q = mantissa * 10f64.powi(decade);
            let dim = dims[dim_idx];
            let rt = s.from_internal(s.to_internal(q, dim), dim);
            prop_assert!((rt - q).abs() / q <= 1e-14);
        }
    }
}
