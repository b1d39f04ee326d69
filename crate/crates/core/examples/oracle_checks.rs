//! The verification report: eigenmode results against the Lyapunov and
//! truncated-Fock oracles plus the invariant checks.

use open_dicke::model::{critical_pump, ModelParams};
use open_dicke::verify::verify_point;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for kappa in [2.0, 0.0] {
        let base = ModelParams::new(-2.0, kappa, 0.0, 0.0)?;
        let p = base.with_y(0.9 * critical_pump(&base)?);
        let report = verify_point(&p)?;
        println!("kappa = {kappa}, y = 0.9 y_c");
        print!("{report}");
        if !report.passed() {
            return Err("verification failed".into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("verification");
}
