//! Closed-system (kappa = 0) fluctuations by symplectic diagonalization of
//! the quadratic Hamiltonian.

use open_dicke::groundstate::ground_state;
use open_dicke::model::{critical_pump, ModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = ModelParams::new(-2.0, 0.0, 0.0, 0.0)?;
    let yc = critical_pump(&base)?;
    for ratio in [0.0, 0.5, 0.9, 0.99, 1.01, 1.5, 2.0] {
        let g = ground_state(&base.with_y(ratio * yc))?;
        println!(
            "y/y_c = {ratio:4.2}  omega = ({:.5}, {:.5})  delta_N = {:.6}  n_photon = {:.6}  symplectic defect {:.1e}",
            g.modes.frequencies[0],
            g.modes.frequencies[1],
            g.observables.delta_n,
            g.observables.n_photon,
            g.modes.symplectic_defect()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("ground-state fluctuations");
}
