use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fluctuations::{NoiseSpec, SecondMoments, StabilityMatrix};
use crate::linalg::{self, CMat4, C64};

/// `max |M S + S M^T + D|` relative to `max(1, |S|)`.
pub fn lyapunov_residual(m: &CMat4, s: &SecondMoments, noise: &NoiseSpec) -> f64 {
    let r = m * s.s + s.s * m.transpose() + noise.diffusion();
    linalg::max_abs(&r) / s.scale().max(1.0)
}

/// Steady second moments from `M S + S M^T + D = 0`, solved as a dense
/// 16x16 system.
pub fn lyapunov_moments(m: &StabilityMatrix, noise: &NoiseSpec) -> Result<SecondMoments> {
    let mm = &m.m;
    let schur = nalgebra::Schur::new(linalg::to_dynamic(mm));
    let eig = schur.eigenvalues().ok_or_else(|| Error::NumericalFailure("Schur form failed".into()))?;
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let max_real = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_real > 1e-12 * scale {
        return Err(Error::UnstableState { max_real });
    }

    // vec index (i, j) -> 4 i + j
    let mut a = DMatrix::<C64>::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            let row = 4 * i + j;
            for k in 0..4 {
                a[(row, 4 * k + j)] += mm[(i, k)];
                a[(row, 4 * i + k)] += mm[(j, k)];
            }
        }
    }
    let d = noise.diffusion();
    let rhs = DVector::<C64>::from_fn(16, |r, _| -d[(r / 4, r % 4)]);

    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 1e-14 * smax {
        // smallest |lambda_k + lambda_l| of the Kronecker-sum operator
        return Err(Error::Divergent { k: 0, l: 0, magnitude: smin });
    }
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure("Lyapunov system is singular".into()))?;
    let s = SecondMoments { s: CMat4::from_fn(|i, j| x[4 * i + j]) };
    let residual = lyapunov_residual(mm, &s, noise);
    if residual > 1e-10 {
        return Err(Error::NumericalFailure(format!("Lyapunov residual {residual:e}")));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuations::build_stability_matrix;
    use crate::model::{solve_mean_field, ModelParams};

    fn matrix(delta_c: f64, kappa: f64, u: f64, y: f64) -> StabilityMatrix {
        let p = ModelParams::new(delta_c, kappa, u, y).unwrap();
        build_stability_matrix(&p, &solve_mean_field(&p).unwrap()).unwrap()
    }

    #[test]
    fn photon_block_alone_is_vacuum() {
        // a damped cavity without coupling: (lambda_1 + lambda_2) s12 + 2 kappa = 0
        let mut m = CMat4::zeros();
        m[(0, 0)] = C64::new(-2.0, -2.0);
        m[(1, 1)] = C64::new(-2.0, 2.0);
        m[(2, 2)] = C64::new(-1.0, -1.0);
        m[(3, 3)] = C64::new(-1.0, 1.0);
        let p = ModelParams::new(-2.0, 2.0, 0.0, 0.0).unwrap();
        let sm = StabilityMatrix { m, params: p, mean_field: solve_mean_field(&p).unwrap() };
        let s = lyapunov_moments(&sm, &NoiseSpec::new(2.0)).unwrap();
        assert!((s.s[(0, 1)] - 1.0).norm() < 1e-14);
        let others = (0..16).filter(|&r| r != 1).map(|r| s.s[(r / 4, r % 4)].norm()).fold(0.0, f64::max);
        assert!(others < 1e-14);
    }

    #[test]
    fn undamped_atoms_at_zero_pump_have_no_unique_steady_state() {
        let s = lyapunov_moments(&matrix(-2.0, 2.0, 0.0, 0.0), &NoiseSpec::new(2.0));
        assert!(matches!(s, Err(Error::Divergent { .. })), "{s:?}");
    }

    #[test]
    fn lossless_input_is_divergent() {
        let s = lyapunov_moments(&matrix(-2.0, 0.0, 0.0, 0.7), &NoiseSpec::new(0.0));
        assert!(matches!(s, Err(Error::Divergent { .. })), "{s:?}");
    }

    #[test]
    fn residual_is_small_on_solutions() {
        let m = matrix(-1.5, 1.0, 0.5, 1.2);
        let noise = NoiseSpec::new(1.0);
        let s = lyapunov_moments(&m, &noise).unwrap();
        assert!(lyapunov_residual(&m.m, &s, &noise) < 1e-12);
    }

    #[test]
    fn unstable_matrix_is_rejected() {
        let mut m = matrix(-1.5, 1.0, 0.0, 0.5);
        m.m[(0, 0)] = C64::new(0.3, -1.5);
        m.m[(1, 1)] = C64::new(0.3, 1.5);
        assert!(matches!(lyapunov_moments(&m, &NoiseSpec::new(1.0)), Err(Error::UnstableState { .. })));
    }
}
