//! Lossless (`kappa = 0`) ground-state fluctuations.
//!
//! At `kappa = 0` the stability matrix has the Hopfield form
//! `M = -i eta H` with `eta = diag(1, -1, 1, -1)` and `H` the Hermitian
//! coefficient matrix of the quadratic fluctuation Hamiltonian
//! `(1/2) R^dag H R`. The ground state is the vacuum of the Bogoliubov
//! modes obtained by symplectic diagonalization of `H`.

use crate::error::{Error, Result};
use crate::fluctuations::{build_stability_matrix, observables, Observables, SecondMoments, StabilityMatrix};
use crate::linalg::{self, adjoint_partner, metric, re, CMat4, CVec4, I};
use crate::model::{critical_pump, solve_mean_field, MeanField, ModelParams, Phase};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Normal modes of the quadratic fluctuation Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovModes {
    /// Positive normal-mode frequencies, ascending.
    pub frequencies: [f64; 2],
    /// `S` with `[b_1, b_1^dag, b_2, b_2^dag] = S R`.
    pub transform: CMat4,
}

impl BogoliubovModes {
    /// `max |S eta S^dag - eta|`.
    pub fn symplectic_defect(&self) -> f64 {
        let eta = metric();
        linalg::max_abs(&(self.transform * eta * self.transform.adjoint() - eta))
    }

    /// `R = T B` with `T = S^-1 = eta S^dag eta`.
    pub fn inverse_transform(&self) -> CMat4 {
        let eta = metric();
        eta * self.transform.adjoint() * eta
    }
}

/// `H = i eta M` at `kappa = 0`, checked Hermitian.
pub fn quadratic_hamiltonian(m: &StabilityMatrix) -> Result<CMat4> {
    if m.params.kappa != 0.0 {
        return Err(Error::InvalidParams("ground state requires kappa = 0".into()));
    }
    let h = (metric() * m.m) * I;
    let defect = linalg::max_abs(&(h - h.adjoint()));
    if defect > HERMITICITY_TOL * linalg::max_abs(&h).max(1.0) {
        return Err(Error::NumericalFailure(format!("fluctuation Hamiltonian not Hermitian ({defect:e})")));
    }
    Ok((h + h.adjoint()).scale(0.5))
}

/// Symplectic diagonalization of `H`: eigenvectors of `eta H` with positive
/// symplectic norm give the annihilation operators.
pub fn bogoliubov_modes(h: &CMat4) -> Result<BogoliubovModes> {
    let eta = metric();
    let k = eta * h;
    let e = linalg::eig(&linalg::to_dynamic(&k))?;
    let scale = e.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut modes: Vec<(f64, CVec4)> = Vec::new();
    for (idx, w) in e.values.iter().enumerate() {
        if w.im.abs() > 1e-9 * scale {
            return Err(Error::DynamicalInstability(format!("complex normal-mode frequency {w}")));
        }
        let v: CVec4 = CVec4::from_fn(|i, _| e.vectors[(i, idx)]);
        let norm = (v.adjoint() * eta * v)[(0, 0)].re;
        if norm > 1e-12 {
            if !(w.re > 0.0) {
                return Err(Error::DynamicalInstability(format!(
                    "positive-norm mode with non-positive frequency {}",
                    w.re
                )));
            }
            modes.push((w.re, v / re(norm.sqrt())));
        } else if norm.abs() <= 1e-12 {
            return Err(Error::DynamicalInstability("zero-norm normal mode".into()));
        }
    }
    if modes.len() != 2 {
        return Err(Error::DynamicalInstability(format!("{} positive-norm modes, expected 2", modes.len())));
    }
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));

    // columns of T: [v_1, J conj v_1, v_2, J conj v_2]
    let cols = [modes[0].1, adjoint_partner(&modes[0].1), modes[1].1, adjoint_partner(&modes[1].1)];
    let t = CMat4::from_fn(|i, j| cols[j][i]);
    let transform = eta * t.adjoint() * eta;
    let out = BogoliubovModes { frequencies: [modes[0].0, modes[1].0], transform };
    let defect = out.symplectic_defect();
    if defect > SYMPLECTIC_TOL {
        return Err(Error::NumericalFailure(format!("Bogoliubov transform not symplectic ({defect:e})")));
    }
    Ok(out)
}

/// Ground-state second moments `T G T^T`, `G` the vacuum of the normal modes.
pub fn ground_state_moments(params: &ModelParams, mf: &MeanField) -> Result<(SecondMoments, BogoliubovModes)> {
    if params.kappa != 0.0 {
        return Err(Error::InvalidParams("ground state requires kappa = 0".into()));
    }
    let yc = critical_pump(params)?;
    if mf.phase == Phase::Normal && params.y >= yc {
        return Err(Error::DynamicalInstability(format!(
            "normal branch at y = {} >= y_c = {yc} has a soft mode",
            params.y
        )));
    }
    let m = build_stability_matrix(params, mf)?;
    let h = quadratic_hamiltonian(&m)?;
    let modes = bogoliubov_modes(&h)?;
    let t = modes.inverse_transform();
    let s = t * SecondMoments::vacuum().s * t.transpose();
    Ok((SecondMoments { s }, modes))
}

/// One point of a ground-state scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStatePoint {
    pub y: f64,
    pub y_over_yc: f64,
    pub mean_field: MeanField,
    pub moments: SecondMoments,
    pub observables: Observables,
    pub modes: BogoliubovModes,
}

pub fn ground_state(params: &ModelParams) -> Result<GroundStatePoint> {
    let yc = critical_pump(params)?;
    let mf = solve_mean_field(params)?;
    let (moments, modes) = ground_state_moments(params, &mf)?;
    let obs = observables(&moments)?;
    Ok(GroundStatePoint { y: params.y, y_over_yc: params.y / yc, mean_field: mf, moments, observables: obs, modes })
}

/// Ground-state scan over `ys` (forces `kappa = 0`).
pub fn ground_state_curve(base: &ModelParams, ys: &[f64]) -> Vec<Result<GroundStatePoint>> {
    let closed = base.with_kappa(0.0);
    ys.iter().map(|&y| ground_state(&closed.with_y(y))).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuations::steady_state;

    fn closed(delta_c: f64, u: f64, ratio: f64) -> ModelParams {
        let p = ModelParams::new(delta_c, 0.0, u, 0.0).unwrap();
        p.with_y(ratio * critical_pump(&p).unwrap())
    }

    #[test]
    fn vacuum_at_zero_pump() {
        let g = ground_state(&closed(-2.0, 0.0, 0.0)).unwrap();
        assert!(g.moments.max_abs_diff(&SecondMoments::vacuum()) < 1e-14);
        assert_eq!(g.modes.frequencies, [1.0, 2.0]);
    }

    #[test]
    fn zero_pump_matches_open_steady_state() {
        let open = steady_state(&ModelParams::new(-2.0, 2.0, 0.0, 0.0).unwrap()).unwrap();
        let g = ground_state(&closed(-2.0, 0.0, 0.0)).unwrap();
        assert!(open.moments.max_abs_diff(&g.moments) < 1e-14);
    }

    #[test]
    fn transform_is_symplectic_and_moments_canonical() {
        for &(dc, u, r) in &[(-2.0, 0.0, 0.5), (-2.0, 0.0, 0.95), (-1.0, 0.5, 1.5), (-3.0, 0.5, 0.3)] {
            let g = ground_state(&closed(dc, u, r)).unwrap();
            assert!(g.modes.symplectic_defect() < 1e-10);
            let (a, b) = g.moments.commutator_defects();
            assert!(a < 1e-10 && b < 1e-10);
            // the Bogoliubov lowering operators annihilate the state
            let s = g.modes.transform;
            let normal = s * g.moments.s * s.transpose();
            assert!(normal[(1, 0)].norm() < 1e-10 && normal[(3, 2)].norm() < 1e-10);
        }
    }

    #[test]
    fn soft_mode_at_threshold() {
        let p = closed(-2.0, 0.0, 1.0);
        let mf = solve_mean_field(&p).unwrap();
        assert!(matches!(ground_state_moments(&p, &mf), Err(Error::DynamicalInstability(_))));
    }

    #[test]
    fn lower_frequency_softens_toward_threshold() {
        let f = |r: f64| ground_state(&closed(-2.0, 0.0, r)).unwrap().modes.frequencies[0];
        assert!(f(0.5) > f(0.9) && f(0.9) > f(0.99) && f(0.99) > f(0.9999));
        assert!(f(1.0 - 1e-8) < 1e-2);
    }

    #[test]
    fn requires_lossless_parameters() {
        let p = ModelParams::new(-2.0, 1.0, 0.0, 0.5).unwrap();
        let mf = solve_mean_field(&p).unwrap();
        assert!(matches!(ground_state_moments(&p, &mf), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn unstable_hamiltonian_is_rejected() {
        // normal-branch matrix forced above threshold
        let p = closed(-2.0, 0.0, 1.3);
        let m = build_stability_matrix(&p, &MeanField::normal()).unwrap();
        let h = quadratic_hamiltonian(&m).unwrap();
        assert!(matches!(bogoliubov_modes(&h), Err(Error::DynamicalInstability(_))));
    }
}
