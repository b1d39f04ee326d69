//! Oracle-equivalence and invariant checks bundled into one report.

use std::fmt;

use crate::analysis::{default_window, exponent_fit, log_spaced, Side};
use crate::entanglement::{log_negativity, quad_covariance, two_mode_squeezed};
use crate::error::Result;
use crate::fluctuations::{build_stability_matrix, steady_state, NoiseSpec};
use crate::groundstate::ground_state;
use crate::model::{critical_pump, ModelParams};
use crate::oracle::{fock_ground_state, lyapunov_moments, lyapunov_residual, FockCutoffs};

pub const LYAPUNOV_TOL: f64 = 1e-8;
pub const BIORTHONORMAL_TOL: f64 = 1e-10;
pub const CONJUGATION_TOL: f64 = 1e-14;
pub const COMMUTATOR_TOL: f64 = 1e-8;
pub const PHYSICALITY_TOL: f64 = 1e-8;
pub const TMSV_TOL: f64 = 1e-8;
pub const FIT_TOL: f64 = 1e-6;
pub const FOCK_TOL: f64 = 1e-3;
/// The Fock comparison is only run this far below threshold.
pub const FOCK_MAX_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Not applicable at this parameter point.
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    /// Measured deviation (or value for lower-bound checks).
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        let outcome = if value <= tolerance { Outcome::Pass } else { Outcome::Fail };
        Self { name: name.into(), outcome, value, tolerance, detail: String::new() }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), outcome: Outcome::Fail, value: f64::NAN, tolerance, detail }
    }

    fn skipped(name: &str, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), outcome: Outcome::Skip, value: f64::NAN, tolerance, detail }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        };
        write!(f, "{tag} {:<32} value={:e} tol={:e}", self.name, self.value, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| c.outcome == Outcome::Fail).count();
        writeln!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Checks that do not depend on the parameter point.
pub fn invariant_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let tmsv = [0.1, 0.5, 1.0, 2.0]
        .iter()
        .map(|&r| match log_negativity(&two_mode_squeezed(r)) {
            Ok(en) => (en - 2.0 * r).abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    out.push(Check::below("tmsv_log_negativity", tmsv, TMSV_TOL));

    let w = default_window();
    let mut fit_err = 0.0f64;
    for &(a, p) in &[(3.0, -1.0), (0.2, -0.5), (7.0, 1.5)] {
        let curve: Vec<(f64, f64)> = log_spaced(w.0, w.1, 40).into_iter().map(|x| (x, a * f64::powf(x, p))).collect();
        fit_err = fit_err.max(match exponent_fit(&curve, w, Side::Below) {
            Ok(f) => (f.slope - p).abs(),
            Err(_) => f64::INFINITY,
        });
    }
    out.push(Check::below("exponent_fit_synthetic", fit_err, FIT_TOL));
    out
}

fn physicality(name: &str, moments: &crate::fluctuations::SecondMoments) -> Check {
    match quad_covariance(moments).and_then(|c| c.min_symplectic_eigenvalue()) {
        Ok(nu) => {
            let deficit = (0.5 - nu).max(0.0);
            Check::below(name, deficit, PHYSICALITY_TOL).with_detail(format!("min symplectic eigenvalue {nu}"))
        }
        Err(e) => Check::failed(name, PHYSICALITY_TOL, e.to_string()),
    }
}

fn open_checks(p: &ModelParams) -> Vec<Check> {
    let mut out = Vec::new();
    let ss = match steady_state(p) {
        Ok(s) => s,
        Err(e) => return vec![Check::failed("steady_state", 0.0, e.to_string())],
    };
    let (r1, r2) = ss.mean_field.residuals(p);
    out.push(Check::below("mean_field_residual", r1.max(r2), crate::model::RESIDUAL_TOL));
    out.push(Check::below("conjugation_symmetry", ss.matrix.conjugation_asymmetry(), CONJUGATION_TOL));
    out.push(Check::below("biorthonormality", ss.modes.biorthonormality_error(), BIORTHONORMAL_TOL));
    out.push(Check::below("completeness", ss.modes.completeness_error(), BIORTHONORMAL_TOL));
    let (c1, c2) = ss.moments.commutator_defects();
    out.push(Check::below("commutator_preservation", c1.max(c2), COMMUTATOR_TOL));
    out.push(physicality("covariance_physicality", &ss.moments));

    let noise = NoiseSpec::new(p.kappa);
    let undamped = ss.modes.lambdas.iter().any(|l| l.re.abs() < 1e-12);
    match lyapunov_moments(&ss.matrix, &noise) {
        Ok(s) => {
            let diff = ss.moments.max_abs_diff(&s);
            out.push(Check::below("lyapunov_equivalence", diff, LYAPUNOV_TOL));
            out.push(Check::below("lyapunov_residual", lyapunov_residual(&ss.matrix.m, &s, &noise), 1e-10));
        }
        Err(e) if undamped => out.push(Check::skipped("lyapunov_equivalence", LYAPUNOV_TOL, format!("undamped mode: {e}"))),
        Err(e) => out.push(Check::failed("lyapunov_equivalence", LYAPUNOV_TOL, e.to_string())),
    }
    out
}

fn closed_checks(p: &ModelParams, yc: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let g = match ground_state(p) {
        Ok(g) => g,
        Err(e) => return vec![Check::failed("ground_state", 0.0, e.to_string())],
    };
    let (r1, r2) = g.mean_field.residuals(p);
    out.push(Check::below("mean_field_residual", r1.max(r2), crate::model::RESIDUAL_TOL));
    match build_stability_matrix(p, &g.mean_field) {
        Ok(m) => out.push(Check::below("conjugation_symmetry", m.conjugation_asymmetry(), CONJUGATION_TOL)),
        Err(e) => out.push(Check::failed("conjugation_symmetry", CONJUGATION_TOL, e.to_string())),
    }
    out.push(Check::below("symplectic_transform", g.modes.symplectic_defect(), crate::groundstate::SYMPLECTIC_TOL));
    let (c1, c2) = g.moments.commutator_defects();
    out.push(Check::below("commutator_preservation", c1.max(c2), COMMUTATOR_TOL));
    out.push(physicality("covariance_physicality", &g.moments));

    if p.y <= FOCK_MAX_RATIO * yc {
        match fock_ground_state(p, &g.mean_field, FockCutoffs::default()) {
            Ok(f) => {
                let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
                let d = rel(f.delta_n, g.observables.delta_n).max(rel(f.n_photon, g.observables.n_photon));
                out.push(Check::below("fock_equivalence", d, FOCK_TOL).with_detail(format!(
                    "cutoff change {:e}, {} Lanczos steps",
                    f.convergence_delta, f.doubled.lanczos_steps
                )));
            }
            Err(e) => out.push(Check::failed("fock_equivalence", FOCK_TOL, e.to_string())),
        }
    } else {
        out.push(Check::skipped("fock_equivalence", FOCK_TOL, format!("pump above {FOCK_MAX_RATIO} y_c")));
    }
    out
}

/// Point checks (open or closed depending on `kappa`) followed by the
/// parameter-independent invariants.
pub fn verify_point(p: &ModelParams) -> Result<VerifyReport> {
    p.validate()?;
    let yc = critical_pump(p)?;
    let mut checks = if p.kappa == 0.0 { closed_checks(p, yc) } else { open_checks(p) };
    checks.extend(invariant_checks());
    Ok(VerifyReport { checks })
}
