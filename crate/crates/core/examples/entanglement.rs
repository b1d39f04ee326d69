//! Logarithmic negativity between cavity and atomic fluctuations close to
//! the threshold: finite in the driven-damped steady state, growing without
//! bound in the ground state.

use open_dicke::entanglement::{log_negativity, quad_covariance, two_mode_squeezed};
use open_dicke::fluctuations::steady_state;
use open_dicke::groundstate::ground_state;
use open_dicke::model::{critical_pump, ModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("two-mode squeezed vacuum r = 0.7: E_N = {:.12}", log_negativity(&two_mode_squeezed(0.7))?);
    let open = ModelParams::new(-2.0, 2.0, 0.0, 0.0)?;
    let closed = ModelParams::new(-2.0, 0.0, 0.0, 0.0)?;
    let (yc_open, yc_closed) = (critical_pump(&open)?, critical_pump(&closed)?);
    for dev in [1e-1, 1e-3, 1e-5, 1e-7] {
        let s = steady_state(&open.with_y((1.0 - dev) * yc_open))?;
        let g = ground_state(&closed.with_y((1.0 - dev) * yc_closed))?;
        let en_open = log_negativity(&quad_covariance(&s.moments)?)?;
        let en_closed = log_negativity(&quad_covariance(&g.moments)?)?;
        println!("|1 - y/y_c| = {dev:.0e}  steady E_N = {en_open:.6}  ground E_N = {en_closed:.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("entanglement");
}
