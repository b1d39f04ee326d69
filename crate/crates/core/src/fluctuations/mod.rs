//! Linearized quantum fluctuations around the mean-field steady state.
//!
//! The fluctuation vector is `R = [da, da^dag, db, db^dag]` and obeys
//! `dR/dt = M R + xi` with cavity noise `xi = [xi, xi^dag, 0, 0]`,
//! `<xi(t) xi^dag(t')> = 2 kappa delta(t - t')`. `M` is non-normal, so its
//! quasi-normal modes `rho_k = l^(k) . R` use a biorthonormal pair of
//! eigenvector sets. Scalar products between left and right vectors are
//! bilinear (no conjugation): the lefts are the rows of the inverse of the
//! right-eigenvector matrix.

pub mod spectrum;

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::linalg::{self, adjoint_partner, adjoint_swap, re, CMat4, CVec4, C64, I, ZERO};
use crate::model::{solve_mean_field, MeanField, ModelParams, OMEGA_R};

/// Eigenvector-matrix condition number above which `M` counts as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;
/// Eigenvalue distance below which a pair is tested for collinearity.
pub const DEGENERATE_EIGENVALUE_GAP: f64 = 1e-8;
/// Overlap `|<r_k, r_l>|` above which near-degenerate vectors are collinear.
pub const COLLINEAR_OVERLAP: f64 = 1.0 - 1e-6;
/// `|lambda_k + lambda_l|` below which a mode correlation diverges.
pub const DIVERGENCE_TOL: f64 = 1e-12;
/// Relative tolerance for identifying `lambda_l = conj(lambda_k)`.
pub const PAIRING_TOL: f64 = 1e-8;
/// Imaginary residue allowed on a real observable (relative to its size).
pub const REAL_RESIDUE_TOL: f64 = 1e-10;

/// Linear stability matrix of a mean-field solution.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMatrix {
    pub m: CMat4,
    pub params: ModelParams,
    pub mean_field: MeanField,
}

impl StabilityMatrix {
    /// `max |M - T conj(M) T|` with `T` the adjoint-slot permutation.
    pub fn conjugation_asymmetry(&self) -> f64 {
        let t = adjoint_swap();
        let mirrored = t * self.m.map(|z| z.conj()) * t;
        linalg::max_abs(&(self.m - mirrored))
    }
}

/// Builds `M` row by row from the linearized equations of motion; rows 2 and
/// 4 are the adjoint equations of rows 1 and 3.
pub fn build_stability_matrix(params: &ModelParams, mf: &MeanField) -> Result<StabilityMatrix> {
    params.validate()?;
    let b2 = mf.beta0_sq();
    let denom = 1.0 - 2.0 * b2;
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateBranch { denominator: denom });
    }
    let s = (1.0 - b2).sqrt();
    let alpha = mf.alpha0;
    let u = params.u;
    let half_y = 0.5 * params.y * denom;

    let photon_diag = C64::new(-params.kappa, params.delta_c - u * b2);
    let photon_to_atom = re(half_y) - I * u * alpha * mf.beta0 * s;
    let atom_diag = -I * (OMEGA_R + u * alpha.norm_sqr()) / denom;
    let atom_from_a = re(-half_y) - I * u * mf.beta0 * s * alpha.conj();
    let atom_from_adag = re(half_y) - I * u * mf.beta0 * s * alpha;

    let row_a = [photon_diag, ZERO, photon_to_atom, photon_to_atom];
    let row_b = [atom_from_a, atom_from_adag, atom_diag, ZERO];
    let mirror = |row: [C64; 4]| [row[1].conj(), row[0].conj(), row[3].conj(), row[2].conj()];
    let rows = [row_a, mirror(row_a), row_b, mirror(row_b)];
    let m = Matrix4::from_fn(|i, j| rows[i][j]);
    Ok(StabilityMatrix { m, params: *params, mean_field: *mf })
}

/// Cavity input noise at zero temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kappa: f64,
}

impl NoiseSpec {
    pub fn new(kappa: f64) -> Self {
        Self { kappa }
    }

    /// `D` with `<xi_i(t) xi_j(t')> = D_ij delta(t - t')`; only `D[0,1] = 2 kappa`.
    pub fn diffusion(&self) -> CMat4 {
        let mut d = CMat4::zeros();
        d[(0, 1)] = re(2.0 * self.kappa);
        d
    }
}

/// Biorthonormal eigensystem of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNormalSystem {
    pub lambdas: [C64; 4],
    /// Right eigenvectors as columns.
    pub rights: CMat4,
    /// Left eigenvectors as rows, `lefts * rights = 1`.
    pub lefts: CMat4,
    /// `pairing[k]` is the index of the mode with eigenvalue `conj(lambda_k)`.
    pub pairing: [usize; 4],
    /// Condition number of the unit-column right-eigenvector matrix.
    pub condition: f64,
}

impl QuasiNormalSystem {
    pub fn right(&self, k: usize) -> CVec4 {
        self.rights.column(k).into_owned()
    }

    pub fn left(&self, k: usize) -> CVec4 {
        self.lefts.row(k).transpose()
    }

    /// `max |(l^(k), r^(l)) - delta_kl|`.
    pub fn biorthonormality_error(&self) -> f64 {
        linalg::max_abs(&(self.lefts * self.rights - CMat4::identity()))
    }

    /// `max |sum_k r^(k) l^(k)^T - 1|`.
    pub fn completeness_error(&self) -> f64 {
        linalg::max_abs(&(self.rights * self.lefts - CMat4::identity()))
    }

    /// Largest real-part mismatch within a conjugate pair.
    pub fn pair_real_part_mismatch(&self) -> f64 {
        (0..4)
            .map(|k| (self.lambdas[k].re - self.lambdas[self.pairing[k]].re).abs())
            .fold(0.0, f64::max)
    }

    /// Canonical commutator `[rho_k, rho_l]`.
    pub fn mode_commutator(&self, k: usize, l: usize) -> C64 {
        let w = linalg::commutator_form();
        (self.left(k).transpose() * w * self.left(l))[(0, 0)]
    }
}

/// Identifies the involution `k -> conj partner` by nearest conjugate.
pub(crate) fn conjugate_pairing(lambdas: &[C64]) -> Result<[usize; 4]> {
    let mut pairing = [0usize; 4];
    for k in 0..4 {
        let target = lambdas[k].conj();
        let (best, dist) = (0..4)
            .map(|l| (l, (lambdas[l] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four eigenvalues");
        if dist >= PAIRING_TOL * lambdas[k].norm().max(1.0) {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue {} has no conjugate partner (closest at {dist:e})",
                lambdas[k]
            )));
        }
        pairing[k] = best;
    }
    for k in 0..4 {
        if pairing[pairing[k]] != k {
            return Err(Error::NumericalFailure("conjugate pairing is not an involution".into()));
        }
    }
    Ok(pairing)
}

/// Above this double-precision condition number the eigenvectors are
/// recomputed in extended precision before the defectiveness test.
pub const REFINE_CONDITION: f64 = 1e4;

/// Condition number plus the collinearity test for near-degenerate pairs.
pub(crate) fn defectiveness(m: &CMat4, lambdas: &[C64], vectors: &CMat4) -> (f64, bool) {
    let mut condition = linalg::condition_number(&linalg::to_dynamic(vectors));
    let mut refined = None;
    if !(condition <= REFINE_CONDITION) {
        if let Some((values, vecs)) = linalg::refined_eigensystem(m, lambdas) {
            condition = linalg::condition_number(&linalg::to_dynamic(&vecs));
            refined = Some((values, vecs));
        }
    }
    let (lambdas, vectors): (&[C64], &CMat4) = match &refined {
        Some((v, w)) => (v, w),
        None => (lambdas, vectors),
    };
    let mut collinear = false;
    for k in 0..4 {
        for l in (k + 1)..4 {
            if (lambdas[k] - lambdas[l]).norm() < DEGENERATE_EIGENVALUE_GAP {
                let overlap = vectors.column(k).dotc(&vectors.column(l)).norm();
                collinear |= overlap > COLLINEAR_OVERLAP;
            }
        }
    }
    (condition, collinear || !(condition <= DEFECTIVE_CONDITION))
}

/// Quasi-normal-mode decomposition of `M`.
pub fn decompose(m: &StabilityMatrix) -> Result<QuasiNormalSystem> {
    decompose_matrix(&m.m)
}

/// Decomposition of any matrix with the adjoint-pairing symmetry of `M`.
pub fn decompose_matrix(m: &CMat4) -> Result<QuasiNormalSystem> {
    let e = linalg::eig(&linalg::to_dynamic(m))?;
    let mut lambdas = [ZERO; 4];
    lambdas.copy_from_slice(&e.values);
    let mut rights = linalg::to_fixed(&e.vectors);

    let (condition, defective) = defectiveness(m, &lambdas, &rights);
    if defective {
        return Err(Error::DefectiveMatrix { condition });
    }
    let pairing = conjugate_pairing(&lambdas)?;

    // enforce the exact symmetry r^(conj k) = J conj(r^(k))
    for k in 0..4 {
        let p = pairing[k];
        if p == k {
            let v = rights.column(k).into_owned();
            let w = adjoint_partner(&v);
            let phase = v.dotc(&w);
            if phase.norm() > 0.5 {
                let half = (phase / phase.norm()).sqrt();
                let fixed = v * half;
                let sym = (fixed + adjoint_partner(&fixed)).scale(0.5);
                rights.set_column(k, &(sym / re(sym.norm())));
            }
            lambdas[k] = re(lambdas[k].re);
        } else if k < p {
            let avg = (lambdas[k] + lambdas[p].conj()) * 0.5;
            lambdas[k] = avg;
            lambdas[p] = avg.conj();
            let v = rights.column(k).into_owned();
            rights.set_column(p, &adjoint_partner(&v));
        }
    }

    let lefts = rights
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("right-eigenvector matrix is singular".into()))?;
    Ok(QuasiNormalSystem { lambdas, rights, lefts, pairing, condition })
}

/// Steady-state `<rho_k rho_l>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCorrelations(pub CMat4);

fn noise_free(q: &QuasiNormalSystem, k: usize) -> bool {
    let l = q.left(k);
    l[0].norm() + l[1].norm() <= 1e-14 * l.norm()
}

/// `<rho_k rho_l> = -2 kappa l_1^(k) l_2^(l) / (lambda_k + lambda_l)`.
///
/// Modes that receive no noise and have no damping (the free atomic mode at
/// `y = 0`) are assigned their oscillator vacuum: `<rho_k rho_l> =
/// [rho_k, rho_l]` for an annihilation/creation pair, zero otherwise.
pub fn mode_correlations(q: &QuasiNormalSystem, noise: &NoiseSpec) -> Result<ModeCorrelations> {
    let scale = q.lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for k in 0..4 {
        let growth = q.lambdas[k].re;
        let undamped = growth >= -1e-14 * scale;
        if growth > 1e-14 * scale || (undamped && !noise_free(q, k)) {
            let max_real = q.lambdas.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::UnstableState { max_real });
        }
    }
    let mut c = CMat4::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let weight = q.lefts[(k, 0)] * q.lefts[(l, 1)];
            let sum = q.lambdas[k] + q.lambdas[l];
            if sum.norm() < DIVERGENCE_TOL {
                if noise_free(q, k) && noise_free(q, l) {
                    let comm = q.mode_commutator(k, l);
                    if l == q.pairing[k] && comm.re > 0.0 {
                        c[(k, l)] = comm;
                    }
                    continue;
                }
                return Err(Error::Divergent { k, l, magnitude: sum.norm() });
            }
            c[(k, l)] = -2.0 * noise.kappa * weight / sum;
        }
    }
    Ok(ModeCorrelations(c))
}

/// Second moments `s[i,j] = <R_i R_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoments {
    pub s: CMat4,
}

impl SecondMoments {
    pub fn vacuum() -> Self {
        let mut s = CMat4::zeros();
        s[(0, 1)] = re(1.0);
        s[(2, 3)] = re(1.0);
        Self { s }
    }

    /// `(s12 - s21 - 1, s34 - s43 - 1)` in absolute value.
    pub fn commutator_defects(&self) -> (f64, f64) {
        (
            (self.s[(0, 1)] - self.s[(1, 0)] - 1.0).norm(),
            (self.s[(2, 3)] - self.s[(3, 2)] - 1.0).norm(),
        )
    }

    pub fn max_abs_diff(&self, other: &SecondMoments) -> f64 {
        linalg::max_abs(&(self.s - other.s))
    }

    pub fn scale(&self) -> f64 {
        linalg::max_abs(&self.s)
    }
}

/// `s = sum_{k,l} <rho_k rho_l> r^(k) r^(l)^T`.
pub fn system_moments(q: &QuasiNormalSystem, corr: &ModeCorrelations) -> SecondMoments {
    SecondMoments { s: q.rights * corr.0 * q.rights.transpose() }
}

/// Incoherent excitation numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// Condensate depletion `<db^dag db>`.
    pub delta_n: f64,
    /// Incoherent photons `<da^dag da>`.
    pub n_photon: f64,
}

fn real_part_checked(z: C64, name: &str) -> Result<f64> {
    if z.im.abs() > REAL_RESIDUE_TOL * z.re.abs().max(1.0) {
        return Err(Error::NumericalFailure(format!("{name} has imaginary residue {:e}", z.im)));
    }
    if z.re < -REAL_RESIDUE_TOL {
        return Err(Error::NumericalFailure(format!("{name} = {:e} is negative", z.re)));
    }
    Ok(z.re)
}

pub fn observables(s: &SecondMoments) -> Result<Observables> {
    Ok(Observables {
        delta_n: real_part_checked(s.s[(3, 2)], "depletion")?,
        n_photon: real_part_checked(s.s[(1, 0)], "photon number")?,
    })
}

/// Everything computed for one open-system parameter point.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub mean_field: MeanField,
    pub matrix: StabilityMatrix,
    pub modes: QuasiNormalSystem,
    pub moments: SecondMoments,
    pub observables: Observables,
}

/// Mean field, decomposition and noise-driven moments in one call.
pub fn steady_state(params: &ModelParams) -> Result<SteadyState> {
    let mean_field = solve_mean_field(params)?;
    let matrix = build_stability_matrix(params, &mean_field)?;
    let modes = decompose(&matrix)?;
    let corr = mode_correlations(&modes, &NoiseSpec::new(params.kappa))?;
    let moments = system_moments(&modes, &corr);
    let observables = observables(&moments)?;
    Ok(SteadyState { mean_field, matrix, modes, moments, observables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::critical_pump;

    fn point(delta_c: f64, kappa: f64, u: f64, ratio: f64) -> ModelParams {
        let base = ModelParams::new(delta_c, kappa, u, 0.0).unwrap();
        base.with_y(ratio * critical_pump(&base).unwrap())
    }

    fn matrix_at(p: &ModelParams) -> StabilityMatrix {
        build_stability_matrix(p, &solve_mean_field(p).unwrap()).unwrap()
    }

    #[test]
    fn uncoupled_matrix_is_diagonal() {
        let p = ModelParams::new(-1.7, 0.8, 0.0, 0.0).unwrap();
        let m = matrix_at(&p).m;
        let expected = [C64::new(-0.8, -1.7), C64::new(-0.8, 1.7), -I, I];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { ZERO };
                assert_eq!(m[(i, j)], want);
            }
        }
    }

    #[test]
    fn uncoupled_spectrum_and_vectors() {
        let p = ModelParams::new(-2.0, 2.0, 0.0, 0.0).unwrap();
        let q = decompose(&matrix_at(&p)).unwrap();
        let mut got: Vec<C64> = q.lambdas.to_vec();
        got.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let want = [C64::new(-2.0, -2.0), C64::new(-2.0, 2.0), -I, I];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-12, "{got:?}");
        }
        for k in 0..4 {
            let r = q.right(k);
            let nonzero = (0..4).filter(|&i| r[i].norm() > 1e-12).count();
            assert_eq!(nonzero, 1);
            assert!((r.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_moments_at_zero_pump() {
        let p = ModelParams::new(-2.0, 2.0, 0.0, 0.0).unwrap();
        let st = steady_state(&p).unwrap();
        assert!(st.moments.max_abs_diff(&SecondMoments::vacuum()) < 1e-14);
        assert_eq!(st.observables.delta_n, 0.0);
        assert_eq!(st.observables.n_photon, 0.0);
        // atom-only modes receive no noise
        for k in 0..4 {
            if q_is_atomic(&st.modes, k) {
                assert_eq!(st.modes.lefts[(k, 0)], ZERO);
                assert_eq!(st.modes.lefts[(k, 1)], ZERO);
            }
        }
    }

    fn q_is_atomic(q: &QuasiNormalSystem, k: usize) -> bool {
        q.lambdas[k].re.abs() < 1e-12
    }

    #[test]
    fn conjugation_symmetry_holds_on_both_branches() {
        for &(dc, k, u, r) in &[(-2.0, 2.0, 0.0, 0.6), (-1.0, 0.5, 0.5, 1.4), (-3.0, 1.0, 0.5, 0.2)] {
            assert!(matrix_at(&point(dc, k, u, r)).conjugation_asymmetry() < 1e-14);
        }
    }

    #[test]
    fn decomposition_is_biorthonormal_and_paired() {
        let q = decompose(&matrix_at(&point(-1.3, 0.9, 0.5, 1.6))).unwrap();
        assert!(q.biorthonormality_error() < 1e-10);
        assert!(q.completeness_error() < 1e-10);
        assert!(q.pair_real_part_mismatch() < 1e-10);
        for k in 0..4 {
            assert_eq!(q.lambdas[q.pairing[k]], q.lambdas[k].conj());
        }
    }

    #[test]
    fn critical_pump_is_a_zero_eigenvalue() {
        let p = point(-2.0, 2.0, 0.0, 1.0);
        let e = linalg::eig(&linalg::to_dynamic(&matrix_at(&p).m)).unwrap();
        let smallest = e.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!(smallest < 1e-12);
        let st = steady_state(&p);
        assert!(matches!(st, Err(Error::UnstableState { .. }) | Err(Error::Divergent { .. })), "{st:?}");
    }

    #[test]
    fn commutators_preserved_below_and_above() {
        for r in [0.3, 0.9, 1.1, 1.7] {
            let st = steady_state(&point(-2.0, 2.0, 0.0, r)).unwrap();
            let (a, b) = st.moments.commutator_defects();
            assert!(a < 1e-8 && b < 1e-8, "r = {r}: {a:e} {b:e}");
        }
    }

    #[test]
    fn lossless_system_has_no_steady_state() {
        let st = steady_state(&point(-2.0, 0.0, 0.0, 0.5));
        assert!(matches!(st, Err(Error::UnstableState { .. })), "{st:?}");
    }

    #[test]
    fn depletion_grows_toward_threshold() {
        let mut last = 0.0;
        for e in [-2.0, -2.5, -3.0, -3.5, -4.0, -5.0, -6.0] {
            let dn = steady_state(&point(-2.0, 2.0, 0.0, 1.0 - 10f64.powf(e))).unwrap().observables.delta_n;
            assert!(dn > last);
            last = dn;
        }
    }

    #[test]
    fn observables_reject_complex_values() {
        let mut s = SecondMoments::vacuum();
        s.s[(3, 2)] = C64::new(0.5, 1e-3);
        assert!(matches!(observables(&s), Err(Error::NumericalFailure(_))));
        s.s[(3, 2)] = C64::new(-0.5, 0.0);
        assert!(observables(&s).is_err());
    }

    #[test]
    fn diffusion_matrix_has_single_entry() {
        let d = NoiseSpec::new(1.5).diffusion();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (0, 1) { re(3.0) } else { ZERO };
                assert_eq!(d[(i, j)], want);
            }
        }
    }
}
