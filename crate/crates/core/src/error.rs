use thiserror::Error;

/// Failures raised anywhere in the pipeline, from parameter checks to the
/// linear-algebra back end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no pumping threshold for delta_c = {delta_c} (requires red detuning, delta_c < 0)")]
    NoThreshold { delta_c: f64 },

    #[error("degenerate superradiant branch: 1 - 2 beta0^2 = {denominator:e}")]
    DegenerateBranch { denominator: f64 },

    #[error("effective cavity detuning {effective_detuning} is not in the cavity-cooling regime")]
    CavityHeating { effective_detuning: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("stability matrix is defective (eigenvector condition number {condition:e})")]
    DefectiveMatrix { condition: f64 },

    #[error("unstable state: largest eigenvalue real part {max_real:e}")]
    UnstableState { max_real: f64 },

    #[error("divergent correlation for modes ({k}, {l}): |lambda_k + lambda_l| = {magnitude:e}")]
    Divergent { k: usize, l: usize, magnitude: f64 },

    #[error("dynamical instability: {0}")]
    DynamicalInstability(String),

    #[error("Fock cutoff too small: relative change {relative_delta:e} on doubling")]
    CutoffTooSmall { relative_delta: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
