use open_dicke::entanglement::{quad_covariance, two_mode_squeezed, log_negativity};
use open_dicke::fluctuations::{steady_state, NoiseSpec};
use open_dicke::groundstate::ground_state;
use open_dicke::model::{critical_pump, ModelParams};
use open_dicke::oracle::lyapunov_moments;
use proptest::prelude::*;

fn point(delta_c: f64, kappa: f64, u: f64, ratio: f64) -> ModelParams {
    let base = ModelParams::new(delta_c, kappa, u, 0.0).unwrap();
    base.with_y(ratio * critical_pump(&base).unwrap())
}

fn ratio() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..0.98, 1.02f64..2.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenmode_moments_solve_the_lyapunov_equation(
        delta_c in -4.0f64..-0.5, kappa in 0.1f64..4.0, u in prop_oneof![Just(0.0), Just(0.5)], r in ratio()
    ) {
        let p = point(delta_c, kappa, u, r);
        let ss = steady_state(&p).unwrap();
        let s = lyapunov_moments(&ss.matrix, &NoiseSpec::new(kappa)).unwrap();
        prop_assert!(ss.moments.max_abs_diff(&s) < 1e-8 * ss.moments.scale().max(1.0));
    }

    #[test]
    fn open_system_invariants(
        delta_c in -4.0f64..-0.5, kappa in 0.1f64..4.0, u in prop_oneof![Just(0.0), Just(0.5)], r in ratio()
    ) {
        let ss = steady_state(&point(delta_c, kappa, u, r)).unwrap();
        prop_assert!(ss.matrix.conjugation_asymmetry() <= 1e-14);
        prop_assert!(ss.modes.biorthonormality_error() < 1e-10);
        prop_assert!(ss.modes.completeness_error() < 1e-10);
        let (c1, c2) = ss.moments.commutator_defects();
        prop_assert!(c1.max(c2) < 1e-8);
        let nu = quad_covariance(&ss.moments).unwrap().min_symplectic_eigenvalue().unwrap();
        prop_assert!(nu >= 0.5 - 1e-8);
        prop_assert!(ss.observables.delta_n >= 0.0 && ss.observables.n_photon >= 0.0);
    }

    #[test]
    fn ground_state_is_pure_and_physical(
        delta_c in -4.0f64..-0.5, u in prop_oneof![Just(0.0), Just(0.5)], r in ratio()
    ) {
        let g = ground_state(&point(delta_c, 0.0, u, r)).unwrap();
        prop_assert!(g.modes.symplectic_defect() < 1e-10);
        let (c1, c2) = g.moments.commutator_defects();
        prop_assert!(c1.max(c2) < 1e-8);
        let cov = quad_covariance(&g.moments).unwrap();
        // a pure Gaussian state has det C = (1/2)^4
        prop_assert!((cov.det() - 1.0 / 16.0).abs() < 1e-8 * cov.c.abs().max().powi(4).max(1.0));
    }

    #[test]
    fn log_negativity_of_squeezed_vacuum(r in 0.0f64..3.0) {
        prop_assert!((log_negativity(&two_mode_squeezed(r)).unwrap() - 2.0 * r).abs() < 1e-8);
    }
}
