//! Noise-driven incoherent excitations of the open system, from the
//! quasi-normal-mode decomposition, checked against the Lyapunov equation.

use open_dicke::fluctuations::{steady_state, NoiseSpec};
use open_dicke::model::{critical_pump, ModelParams};
use open_dicke::oracle::lyapunov_moments;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = ModelParams::new(-2.0, 2.0, 0.0, 0.0)?;
    let yc = critical_pump(&base)?;
    for ratio in [0.2, 0.5, 0.9, 0.99, 0.999, 1.001, 1.1, 1.5] {
        let p = base.with_y(ratio * yc);
        let ss = steady_state(&p)?;
        let oracle = lyapunov_moments(&ss.matrix, &NoiseSpec::new(p.kappa))?;
        println!(
            "y/y_c = {ratio:6.3}  delta_N = {:12.6}  n_photon = {:12.6}  |S - S_lyap| = {:.1e}",
            ss.observables.delta_n,
            ss.observables.n_photon,
            ss.moments.max_abs_diff(&oracle)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("steady-state fluctuations");
}
