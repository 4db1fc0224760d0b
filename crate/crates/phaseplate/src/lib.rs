//! Two-slit electron interference around an ideal solenoid, treated as a
//! refractive phase plate: the vector potential modulates the local de
//! Broglie wavelength on each arm, and the resulting arm phase difference
//! displaces the fringe pattern without touching its envelope.
//!
//! The crate has three layers:
//! - closed-form kinematics and line integrals ([`phase`], [`fields`],
//!   [`fringes`]) that predict the fringe displacement,
//! - a split-step wavepacket propagator ([`schrodinger`]) that measures the
//!   same displacement from an actual two-slit scattering run,
//! - a small CLI ([`cli`]) that exposes both and cross-checks them.

pub mod acceptance;
pub mod cli;
pub mod constants;
pub mod error;
pub mod fields;
pub mod fringes;
pub mod geom;
pub mod phase;
pub mod quad;
pub mod schrodinger;

pub use error::{Error, Result};
