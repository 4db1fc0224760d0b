//! Closed-form walk through the benchmark apparatus: a 10 kV electron
//! passing a 5 um solenoid that encloses exactly one flux quantum.
//!
//!     cargo run --example benchmark_numbers

use phaseplate::constants::PhysicalConstants;
use phaseplate::fields::SolenoidSpec;
use phaseplate::fringes::{fringe_shift_prediction, SlitGeometry};
use phaseplate::geom::Vec2;
use phaseplate::phase::{phase_plate_delta_phi, phase_plate_model, ElectronState};

fn main() -> phaseplate::Result<()> {
    let constants = PhysicalConstants::electron();
    let state = ElectronState::from_voltage(constants, 10e3)?;
    println!("accelerating voltage   10 kV");
    println!("canonical momentum     {:.3e} kg m/s", state.momentum);
    println!("de Broglie wavelength  {:.3e} m", state.wavelength);

    let solenoid = SolenoidSpec::new(Vec2::ZERO, 5e-6, constants.flux_quantum)?;
    let model = phase_plate_model(&state, &solenoid);
    println!();
    println!("enclosed flux          {:.6e} Wb (one flux quantum)", solenoid.flux);
    println!("wall potential A_theta {:.3e} Wb/m", solenoid.flux / model.interaction_length);
    println!("arm indices            {:.12} / {:.12}", model.qri_upper, model.qri_lower);
    println!("index split            {:.3e}", model.delta_n_q);

    // The plate phase is e Phi / hbar regardless of the electron energy.
    let delta_phi = phase_plate_delta_phi(&state, &solenoid);
    println!("arm phase difference   {:.12} rad (2 pi = {:.12})", delta_phi, std::f64::consts::TAU);

    let slits = SlitGeometry::new(1e-6, 0.28e-6, 1.0, 130e-6, 2049)?;
    let shift = fringe_shift_prediction(&slits, &state, solenoid.flux);
    let spacing = slits.fringe_spacing(&state);
    println!();
    println!("fringe spacing         {:.3e} m", spacing);
    println!("predicted shift        {:.3e} m = {:.6} fringes", shift, shift / spacing);
    Ok(())
}
