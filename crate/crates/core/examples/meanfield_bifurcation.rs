//! Pitchfork bifurcation of the mean-field steady state: the condensate
//! order parameter `beta0^2` switches on at the threshold `y_c`.

use open_dicke::model::{critical_pump, mean_field_curve, ModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for kappa in [0.0, 2.0] {
        let base = ModelParams::new(-2.0, kappa, 0.0, 0.0)?;
        let yc = critical_pump(&base)?;
        println!("kappa = {kappa}: y_c = {yc:.6}");
        let ys: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64 * yc).collect();
        for point in mean_field_curve(&base, &ys) {
            let p = point?;
            println!(
                "  y/y_c = {:4.2}  phase = {:<12}  beta0^2 = {:.6}  |alpha0|^2 = {:.6}",
                p.y_over_yc,
                p.mean_field.phase.as_str(),
                p.beta0_sq(),
                p.alpha0_sq()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("mean-field sweep");
}
