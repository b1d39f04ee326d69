//! Cavity-atom entanglement of the Gaussian fluctuation state.
//!
//! Quadratures `u = (dx, dy, dX, dY)` with `dx = (da + da^dag)/sqrt 2`,
//! `dy = -i(da - da^dag)/sqrt 2` (same for `db`). The symmetrized covariance
//! `C = [[P, X], [X^T, A]]` has vacuum value `1/2`. The smallest symplectic
//! eigenvalue of the partial transpose follows from the invariants
//! `Sigma = det P + det A - 2 det X` and `det C`; the logarithmic negativity
//! uses the natural logarithm, `E_N = max(0, -ln(2 nu_-))`.

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::fluctuations::SecondMoments;
use crate::linalg::{self, re, CMat4, C64, I, ZERO};

pub const RESIDUE_TOL: f64 = 1e-10;

/// Real symmetric quadrature covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCovariance {
    pub c: Matrix4<f64>,
}

fn det2(m: Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

impl QuadCovariance {
    pub fn vacuum() -> Self {
        Self { c: Matrix4::identity() * 0.5 }
    }

    pub fn photon_block(&self) -> Matrix2<f64> {
        self.c.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn atom_block(&self) -> Matrix2<f64> {
        self.c.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn cross_block(&self) -> Matrix2<f64> {
        self.c.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// `det P + det A - 2 det X`.
    pub fn sigma(&self) -> f64 {
        det2(self.photon_block()) + det2(self.atom_block()) - 2.0 * det2(self.cross_block())
    }

    pub fn det(&self) -> f64 {
        self.c.determinant()
    }

    /// Smallest partial-transpose symplectic eigenvalue from the invariants.
    pub fn nu_minus(&self) -> Result<f64> {
        let sigma = self.sigma();
        let det = self.det();
        let mut disc = sigma * sigma - 4.0 * det;
        let tol = 1e-10 * (sigma * sigma).max(1.0);
        if disc < -tol {
            return Err(Error::NumericalFailure(format!("negative invariant discriminant {disc:e}")));
        }
        disc = disc.max(0.0);
        // product of the two roots is det, which avoids the cancellation in
        // sigma - sqrt(disc) for strongly squeezed states
        let big = sigma + disc.sqrt();
        let nu_sq = if sigma > 0.0 && big > 0.0 { (2.0 * det / big).max(0.0) } else { (0.5 * (sigma - disc.sqrt())).max(0.0) };
        Ok(nu_sq.sqrt())
    }

    /// `C` with the momentum quadrature of the atom mode sign-flipped.
    pub fn partial_transpose(&self) -> Self {
        let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        Self { c: flip * self.c * flip }
    }

    /// Symplectic spectrum (ascending, two values) via the eigenvalues
    /// `+-nu` of `i Omega C`.
    pub fn symplectic_eigenvalues(&self) -> Result<[f64; 2]> {
        let omega = Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        );
        let k: CMat4 = (omega * self.c).map(|x| I * x);
        let e = linalg::eig(&linalg::to_dynamic(&k))?;
        let mut nus: Vec<f64> = e.values.iter().map(|z| z.re).filter(|x| *x > 0.0).collect();
        nus.sort_by(|a, b| a.total_cmp(b));
        if nus.len() != 2 {
            let mut abs: Vec<f64> = e.values.iter().map(|z| z.norm()).collect();
            abs.sort_by(|a, b| a.total_cmp(b));
            return Ok([abs[0], abs[2]]);
        }
        Ok([nus[0], nus[1]])
    }

    /// `min nu` of `C` itself; physical states have it `>= 1/2`.
    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(self.symplectic_eigenvalues()?[0])
    }

    /// Spectrum route to `nu_-`, independent of the invariant formula.
    pub fn nu_minus_from_spectrum(&self) -> Result<f64> {
        Ok(self.partial_transpose().symplectic_eigenvalues()?[0])
    }

    pub fn symmetry_defect(&self) -> f64 {
        (self.c - self.c.transpose()).abs().max()
    }
}

/// Two-mode squeezed vacuum with squeezing parameter `r`.
pub fn two_mode_squeezed(r: f64) -> QuadCovariance {
    let ch = 0.5 * (2.0 * r).cosh();
    let sh = 0.5 * (2.0 * r).sinh();
    QuadCovariance {
        c: Matrix4::new(
            ch, 0.0, sh, 0.0, //
            0.0, ch, 0.0, -sh, //
            sh, 0.0, ch, 0.0, //
            0.0, -sh, 0.0, ch,
        ),
    }
}

/// Ladder second moments to symmetrized quadrature covariance.
pub fn quad_covariance(s: &SecondMoments) -> Result<QuadCovariance> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let w = CMat4::new(
        re(h), re(h), ZERO, ZERO, //
        -I * h, I * h, ZERO, ZERO, //
        ZERO, ZERO, re(h), re(h), //
        ZERO, ZERO, -I * h, I * h,
    );
    let q = w * s.s * w.transpose();
    let sym = (q + q.transpose()) * C64::new(0.5, 0.0);
    let scale = linalg::max_abs(&sym).max(1.0);
    let residue = sym.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > RESIDUE_TOL * scale {
        return Err(Error::NumericalFailure(format!("quadrature covariance imaginary residue {residue:e}")));
    }
    Ok(QuadCovariance { c: sym.map(|z| z.re) })
}

/// `E_N = max(0, -ln(2 nu_-))`.
pub fn log_negativity(cov: &QuadCovariance) -> Result<f64> {
    let nu = cov.nu_minus()?;
    if nu >= 0.5 {
        return Ok(0.0);
    }
    Ok(-(2.0 * nu).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vacuum_covariance_is_half_identity() {
        let c = quad_covariance(&SecondMoments::vacuum()).unwrap();
        assert!((c.c - Matrix4::identity() * 0.5).abs().max() < 1e-15);
        assert_eq!(log_negativity(&c).unwrap(), 0.0);
        assert!((c.min_symplectic_eigenvalue().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_closed_form() {
        for r in [0.1, 0.5, 1.3, 2.0] {
            let c = two_mode_squeezed(r);
            let nu = c.nu_minus().unwrap();
            assert!((nu - 0.5 * (-2.0 * r).exp()).abs() < 1e-12);
            assert!((log_negativity(&c).unwrap() - 2.0 * r).abs() < 1e-8);
            assert!((c.nu_minus_from_spectrum().unwrap() - nu).abs() < 1e-10);
            assert!((c.det() - 1.0 / 16.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_complex_moments() {
        let mut s = SecondMoments::vacuum();
        s.s[(0, 2)] = C64::new(0.0, 0.3);
        assert!(quad_covariance(&s).is_err());
    }

    #[test]
    fn thermal_product_state_is_separable() {
        let c = QuadCovariance { c: Matrix4::identity() * 1.7 };
        assert_eq!(log_negativity(&c).unwrap(), 0.0);
    }

    fn rotation(theta: f64) -> Matrix2<f64> {
        Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
    }

    proptest! {
        #[test]
        fn local_rotations_leave_negativity_unchanged(r in 0.0f64..2.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let c = two_mode_squeezed(r);
            let mut local = Matrix4::zeros();
            local.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation(a));
            local.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation(b));
            let rotated = QuadCovariance { c: local * c.c * local.transpose() };
            let e0 = log_negativity(&c).unwrap();
            let e1 = log_negativity(&rotated).unwrap();
            prop_assert!((e0 - e1).abs() < 1e-10);
            prop_assert!((rotated.nu_minus().unwrap() - rotated.nu_minus_from_spectrum().unwrap()).abs() < 1e-10);
        }
    }
}
