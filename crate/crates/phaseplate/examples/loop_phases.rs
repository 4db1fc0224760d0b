//! Loop integrals of the vector potential: the phase only counts how many
//! times the loop winds around the flux, never where the loop sits or which
//! gauge evaluates it.
//!
//!     cargo run --example loop_phases

use phaseplate::constants::PhysicalConstants;
use phaseplate::fields::{Gauge, SolenoidSpec};
use phaseplate::geom::{Direction, Vec2};
use phaseplate::phase::{ab_phase_loop, ElectronState, PolylinePath};

fn main() -> phaseplate::Result<()> {
    let constants = PhysicalConstants::electron();
    let state = ElectronState::from_voltage(constants, 10e3)?;
    let r = 5e-6;
    let solenoid = SolenoidSpec::new(Vec2::ZERO, r, 0.5 * constants.flux_quantum)?;
    let expected = constants.e / constants.hbar * solenoid.flux;
    println!("half a flux quantum enclosed; e Phi / hbar = {expected:.9} rad");
    println!();

    let gauges = [
        ("symmetric", Gauge::Symmetric),
        (
            "string-offset",
            Gauge::StringOffset {
                string_direction: Direction::from_angle(2.3),
            },
        ),
    ];
    let loops: [(&str, PolylinePath); 4] = [
        ("circle 2R", PolylinePath::circle(Vec2::ZERO, 2.0 * r, 512, 1)?),
        ("circle 20R off-center", PolylinePath::circle(Vec2::new(3.0 * r, -2.0 * r), 20.0 * r, 512, 1)?),
        ("square 3R", PolylinePath::square(Vec2::ZERO, 3.0 * r)?),
        ("circle 2R, 3 turns cw", PolylinePath::circle(Vec2::ZERO, 2.0 * r, 512, -3)?),
    ];
    for (gauge_name, gauge) in &gauges {
        for (loop_name, path) in &loops {
            let phase = ab_phase_loop(&state, &solenoid, gauge, path)?;
            let winding = path.winding_number(solenoid.center)?;
            println!(
                "{gauge_name:13} {loop_name:22} winding {winding:+} phase {phase:+.9} rad \
                 (deviation {:+.2e})",
                phase - expected * winding as f64
            );
        }
    }

    // A loop that stays outside picks up nothing, singular gauge or not.
    let clear = PolylinePath::circle(Vec2::new(4.0 * r, 0.0), 1.5 * r, 512, 1)?;
    for (gauge_name, gauge) in &gauges {
        let phase = ab_phase_loop(&state, &solenoid, gauge, &clear)?;
        println!("{gauge_name:13} non-enclosing circle   winding 0 phase {phase:+.2e} rad");
    }
    Ok(())
}
