//! Log-log fits of the condensate depletion against `|1 - y/y_c|` on both
//! sides of the threshold, for the open and the closed system.

use open_dicke::analysis::{critical_exponent, default_window, Observable, Side, POINTS_PER_SIDE};
use open_dicke::model::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (label, kappa) in [("open (kappa = 2)", 2.0), ("closed (kappa = 0)", 0.0)] {
        let base = ModelParams::new(-2.0, kappa, 0.0, 0.0)?;
        for side in [Side::Below, Side::Above] {
            let fit = critical_exponent(&base, side, Observable::DeltaN, default_window(), POINTS_PER_SIDE)?;
            println!(
                "{label:<20} {:<5}  slope = {:+.4}  r^2 = {:.6}  points = {}",
                side.as_str(),
                fit.slope,
                fit.r_squared,
                fit.n_points
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("exponent fits");
}
