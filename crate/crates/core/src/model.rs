//! Couplings of the two-mode model and its mean-field steady state.
//!
//! The cavity amplitude `alpha0` and the matter-wave order parameter `beta0`
//! satisfy the pair of stationarity conditions
//!
//! ```text
//! [i(delta_c - u beta0^2) - kappa] alpha0 = -y beta0 sqrt(1 - beta0^2)
//! (omega_r + u |alpha0|^2) beta0 = -y Im(alpha0) (1 - 2 beta0^2) / sqrt(1 - beta0^2)
//! ```
//!
//! with threshold `y_c^2 = -omega_r (delta_c^2 + kappa^2) / delta_c`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Recoil frequency; the unit of every frequency in the crate.
pub const OMEGA_R: f64 = 1.0;

/// Residual tolerance for the stationarity conditions.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// One physical configuration in recoil units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Effective cavity detuning `Delta_C - 2u`.
    pub delta_c: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Collective dispersive shift `N U_0 / 4`.
    pub u: f64,
    /// Collective pump strength `sqrt(2N) eta_t`.
    pub y: f64,
}

impl ModelParams {
    pub fn new(delta_c: f64, kappa: f64, u: f64, y: f64) -> Result<Self> {
        let p = Self { delta_c, kappa, u, y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta_c, self.kappa, self.u, self.y].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("couplings must be finite".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParams(format!("kappa = {} must be >= 0", self.kappa)));
        }
        if self.y < 0.0 {
            return Err(Error::InvalidParams(format!("y = {} must be >= 0", self.y)));
        }
        Ok(())
    }

    pub fn with_y(self, y: f64) -> Self {
        Self { y, ..self }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn critical_pump(&self) -> Result<f64> {
        critical_pump(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Normal,
    Superradiant,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Superradiant => "superradiant",
        }
    }
}

/// Mean-field steady state (per-sqrt(N) amplitudes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField {
    pub alpha0: Complex64,
    pub beta0: f64,
    /// Chemical potential.
    pub mu: f64,
    pub phase: Phase,
}

impl MeanField {
    pub fn beta0_sq(&self) -> f64 {
        self.beta0 * self.beta0
    }

    /// Coherent photon number per atom, `|alpha0|^2`.
    pub fn alpha0_sq(&self) -> f64 {
        self.alpha0.norm_sqr()
    }

    /// `delta_c - u beta0^2`.
    pub fn effective_detuning(&self, p: &ModelParams) -> f64 {
        p.delta_c - p.u * self.beta0_sq()
    }

    /// Magnitudes of the two stationarity conditions evaluated on `self`.
    pub fn residuals(&self, p: &ModelParams) -> (f64, f64) {
        let b2 = self.beta0_sq();
        let s = (1.0 - b2).sqrt();
        let d = p.delta_c - p.u * b2;
        let cavity = Complex64::new(-p.kappa, d) * self.alpha0 + p.y * self.beta0 * s;
        let matter = if s > 0.0 {
            (OMEGA_R + p.u * self.alpha0_sq()) * self.beta0
                + p.y * self.alpha0.im * (1.0 - 2.0 * b2) / s
        } else {
            f64::INFINITY
        };
        (cavity.norm(), matter.abs())
    }

    /// Normal-phase solution, valid for every parameter set.
    pub fn normal() -> Self {
        Self { alpha0: Complex64::new(0.0, 0.0), beta0: 0.0, mu: -0.5 * OMEGA_R, phase: Phase::Normal }
    }
}

/// Pumping threshold `y_c = sqrt(-(delta_c^2 + kappa^2) omega_r / delta_c)`.
pub fn critical_pump(p: &ModelParams) -> Result<f64> {
    if !(p.delta_c < 0.0) {
        return Err(Error::NoThreshold { delta_c: p.delta_c });
    }
    Ok((-(p.delta_c * p.delta_c + p.kappa * p.kappa) * OMEGA_R / p.delta_c).sqrt())
}

/// Closed-form `beta0^2` of the superradiant branch.
///
/// `(d/u)(1 - sqrt(1 - t))` with `t = (u/d) q` is rewritten as
/// `q / (1 + sqrt(1 - t))`: identical for `u != 0`, free of the `0/0` at
/// `u = 0` where it reduces to `(y^2 - y_c^2) / (2 y^2)`.
fn superradiant_beta0_sq(p: &ModelParams, yc: f64) -> Result<f64> {
    let y2 = p.y * p.y;
    let q = (y2 - yc * yc) / (y2 + p.u * OMEGA_R);
    let t = p.u * q / p.delta_c;
    let inner = 1.0 - t;
    if !(inner >= 0.0) || !q.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "superradiant closed form has negative radicand {inner:e}"
        )));
    }
    Ok(q / (1.0 + inner.sqrt()))
}

/// Mean-field steady state: normal for `y <= y_c`, otherwise the
/// superradiant branch with `beta0 > 0`.
pub fn solve_mean_field(p: &ModelParams) -> Result<MeanField> {
    p.validate()?;
    let yc = critical_pump(p)?;
    let mf = if p.y <= yc {
        MeanField::normal()
    } else {
        let b2 = superradiant_beta0_sq(p, yc)?;
        if !(b2 > 0.0 && b2 < 1.0) {
            return Err(Error::NumericalFailure(format!("beta0^2 = {b2} outside (0, 1)")));
        }
        let denom = 1.0 - 2.0 * b2;
        if denom.abs() < 1e-14 {
            return Err(Error::DegenerateBranch { denominator: denom });
        }
        let beta0 = b2.sqrt();
        let d = p.delta_c - p.u * b2;
        let alpha0 = -(p.y * beta0 * (1.0 - b2).sqrt()) / Complex64::new(-p.kappa, d);
        let mu = -0.5 * (OMEGA_R + p.u * alpha0.norm_sqr()) / denom;
        MeanField { alpha0, beta0, mu, phase: Phase::Superradiant }
    };
    let eff = mf.effective_detuning(p);
    if !(eff < 0.0) {
        return Err(Error::CavityHeating { effective_detuning: eff });
    }
    let (r1, r2) = mf.residuals(p);
    if !(r1 < RESIDUAL_TOL && r2 < RESIDUAL_TOL) {
        return Err(Error::NumericalFailure(format!(
            "mean-field residuals ({r1:e}, {r2:e}) exceed {RESIDUAL_TOL:e}"
        )));
    }
    Ok(mf)
}

/// One point of the bifurcation diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldPoint {
    pub y: f64,
    pub y_over_yc: f64,
    pub mean_field: MeanField,
}

impl MeanFieldPoint {
    pub fn alpha0_sq(&self) -> f64 {
        self.mean_field.alpha0_sq()
    }

    pub fn beta0_sq(&self) -> f64 {
        self.mean_field.beta0_sq()
    }
}

/// Bifurcation curve over `ys` at fixed `(delta_c, kappa, u)`; errors are
/// reported per grid point.
pub fn mean_field_curve(base: &ModelParams, ys: &[f64]) -> Vec<Result<MeanFieldPoint>> {
    ys.iter()
        .map(|&y| {
            let p = base.with_y(y);
            let yc = critical_pump(&p)?;
            let mf = solve_mean_field(&p)?;
            Ok(MeanFieldPoint { y, y_over_yc: y / yc, mean_field: mf })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta_c: f64, kappa: f64, u: f64, y: f64) -> ModelParams {
        ModelParams::new(delta_c, kappa, u, y).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert!((critical_pump(&params(-2.0, 2.0, 0.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((critical_pump(&params(-1.0, 0.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            critical_pump(&params(1.0, 1.0, 0.0, 0.0)),
            Err(Error::NoThreshold { delta_c: 1.0 })
        );
        assert!(matches!(critical_pump(&params(0.0, 1.0, 0.0, 0.0)), Err(Error::NoThreshold { .. })));
    }

    #[test]
    fn threshold_does_not_depend_on_u_or_y() {
        let a = critical_pump(&params(-1.5, 0.7, 0.0, 0.0)).unwrap();
        let b = critical_pump(&params(-1.5, 0.7, 0.9, 3.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn below_threshold_is_normal() {
        let mf = solve_mean_field(&params(-1.0, 0.0, 0.0, 0.5)).unwrap();
        assert_eq!(mf.phase, Phase::Normal);
        assert_eq!(mf.alpha0, Complex64::new(0.0, 0.0));
        assert_eq!(mf.beta0, 0.0);
    }

    #[test]
    fn exactly_at_threshold_is_normal() {
        let mf = solve_mean_field(&params(-2.0, 2.0, 0.0, 2.0)).unwrap();
        assert_eq!(mf.phase, Phase::Normal);
    }

    #[test]
    fn superradiant_example_kappa_zero() {
        let mf = solve_mean_field(&params(-1.0, 0.0, 0.0, 2f64.sqrt())).unwrap();
        assert_eq!(mf.phase, Phase::Superradiant);
        assert!((mf.beta0 - 0.5).abs() < 1e-14);
        // -y beta0 sqrt(1 - beta0^2) / (i delta_c) = -sqrt(3/8) i
        assert!(mf.alpha0.re.abs() < 1e-14);
        assert!((mf.alpha0.im + (3.0f64 / 8.0).sqrt()).abs() < 1e-14);
        assert!((mf.alpha0.im + 0.6124).abs() < 1e-4);
    }

    #[test]
    fn superradiant_example_lossy() {
        let yc = 2.0;
        let mf = solve_mean_field(&params(-2.0, 2.0, 0.0, 2.0 * yc)).unwrap();
        assert!((mf.beta0_sq() - 0.375).abs() < 1e-14);
    }

    #[test]
    fn dispersive_shift_matches_closed_form() {
        let (dc, k, u) = (-2.0, 1.0, 0.5);
        let p = params(dc, k, u, 3.0);
        let yc = critical_pump(&p).unwrap();
        let mf = solve_mean_field(&p).unwrap();
        let q = (9.0 - yc * yc) / (9.0 + u);
        let direct = dc / u * (1.0 - (1.0 - u / dc * q).sqrt());
        assert!((mf.beta0_sq() - direct).abs() < 1e-13);
        let (r1, r2) = mf.residuals(&p);
        assert!(r1 < 1e-12 && r2 < 1e-12);
        let mu = -0.5 * (1.0 + u * mf.alpha0_sq()) / (1.0 - 2.0 * mf.beta0_sq());
        assert_eq!(mf.mu, mu);
    }

    #[test]
    fn branch_symmetry_and_positive_choice() {
        let p = params(-1.3, 0.4, 0.2, 2.5);
        let mf = solve_mean_field(&p).unwrap();
        assert!(mf.beta0 > 0.0);
        let flipped = MeanField { alpha0: -mf.alpha0, beta0: -mf.beta0, ..mf };
        let (r1, r2) = flipped.residuals(&p);
        assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn rejects_blue_detuning_and_bad_inputs() {
        assert!(matches!(solve_mean_field(&params(0.5, 1.0, 0.0, 0.1)), Err(Error::NoThreshold { .. })));
        assert!(ModelParams::new(-1.0, -0.1, 0.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 0.1, 0.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn curve_reports_errors_per_point() {
        let base = params(-2.0, 2.0, 0.0, 0.0);
        let pts = mean_field_curve(&base, &[0.0, 2.0, 4.0]);
        assert_eq!(pts.len(), 3);
        let at = pts[1].as_ref().unwrap();
        assert_eq!(at.y_over_yc, 1.0);
        assert_eq!(at.beta0_sq(), 0.0);
        assert!((pts[2].as_ref().unwrap().beta0_sq() - 0.375).abs() < 1e-14);
        let blue = params(1.0, 1.0, 0.0, 0.0);
        assert!(mean_field_curve(&blue, &[0.1])[0].is_err());
    }

    proptest::proptest! {
        #[test]
        fn residuals_vanish_on_every_solution(
            dc in -4.0f64..-0.3, kappa in 0.0f64..4.0, u in -0.4f64..1.0, ratio in 0.0f64..3.0,
        ) {
            let yc = critical_pump(&params(dc, kappa, u, 0.0)).unwrap();
            let p = params(dc, kappa, u, ratio * yc);
            if let Ok(mf) = solve_mean_field(&p) {
                let (r1, r2) = mf.residuals(&p);
                proptest::prop_assert!(r1 < 1e-12 && r2 < 1e-12);
                proptest::prop_assert!(mf.beta0 >= 0.0);
            }
        }

        #[test]
        fn bifurcation_is_kappa_independent_without_shift(
            dc in -4.0f64..-0.3, kappa in 0.0f64..4.0, ratio in 0.0f64..3.0,
        ) {
            let a = params(dc, 0.0, 0.0, 0.0);
            let b = params(dc, kappa, 0.0, 0.0);
            let ma = solve_mean_field(&a.with_y(ratio * a.critical_pump().unwrap())).unwrap();
            let mb = solve_mean_field(&b.with_y(ratio * b.critical_pump().unwrap())).unwrap();
            proptest::prop_assert!((ma.beta0_sq() - mb.beta0_sq()).abs() < 1e-12);
        }

        #[test]
        fn order_parameter_vanishes_continuously(dc in -4.0f64..-0.3, kappa in 0.0f64..4.0, u in 0.0f64..1.0) {
            let yc = critical_pump(&params(dc, kappa, u, 0.0)).unwrap();
            let mf = solve_mean_field(&params(dc, kappa, u, yc * (1.0 + 1e-9))).unwrap();
            proptest::prop_assert!(mf.beta0_sq() < 1e-8);
        }
    }
}
