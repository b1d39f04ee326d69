//! Eigenvalues of the stability matrix along a pump scan, and the interval
//! on which the atom-like pair becomes purely damped.

use open_dicke::fluctuations::spectrum::spectrum_scan;
use open_dicke::model::{critical_pump, ModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = ModelParams::new(-2.0, 2.0, 0.0, 0.0)?;
    let yc = critical_pump(&base)?;
    let ys: Vec<f64> = (0..=150).map(|k| 1.5 * yc * k as f64 / 150.0).collect();
    let scan = spectrum_scan(&base, &ys)?;
    for pt in scan.points.iter().step_by(25) {
        let l = pt.lambdas;
        println!(
            "y/y_c = {:4.2}  minus {:+.4}{:+.4}i  plus {:+.4}{:+.4}i",
            pt.y / yc,
            l[0].re,
            l[0].im,
            l[2].re,
            l[2].im
        );
    }
    for iv in &scan.real_intervals {
        if let (Some(lo), Some(hi)) = (iv.lower, iv.upper) {
            println!(
                "real interval y/y_c in [{:.6}, {:.6}]; edge condition numbers {:.3e}, {:.3e}; defective: {}, {}",
                lo.y / yc,
                hi.y / yc,
                lo.condition,
                hi.condition,
                lo.defective,
                hi.defective
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spectrum scan");
}
