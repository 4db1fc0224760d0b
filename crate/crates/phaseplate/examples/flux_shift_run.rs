//! Full wavepacket run through the two-slit apparatus at quarter flux,
//! compared against the flux-free run. Uses the small preset (256 x 256,
//! about a second per pass) rather than the desk-scale one.
//!
//!     cargo run --example flux_shift_run

use phaseplate::fringes::extract_fringe_shift;
use phaseplate::schrodinger::dispersion;

fn main() -> phaseplate::Result<()> {
    let alpha = 0.25;
    let preset = dispersion(1, alpha)?;
    println!(
        "grid {} x {}, {} steps, solenoid at ({}, {}) behind the slits",
        preset.grid.nx,
        preset.grid.ny,
        preset.grid.step_count,
        preset.geometry.solenoid.x,
        preset.geometry.solenoid.y,
    );

    let (pattern, arrival) = preset.run()?;
    let (reference, arrival_ref) = dispersion(1, 0.0)?.run()?;

    let shift = extract_fringe_shift(&pattern, &reference)? / pattern.fringe_spacing_hint;
    println!("applied flux   {alpha} flux quanta");
    println!("measured shift {shift:+.4} fringes");
    println!(
        "crossing probability {:.3} (flux-free {:.3})",
        arrival.crossing_probability, arrival_ref.crossing_probability
    );
    Ok(())
}
