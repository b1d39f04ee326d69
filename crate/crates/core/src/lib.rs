//! Critical behaviour of the driven-damped (open) two-mode Dicke model.
//!
//! The crate follows a single pipeline:
//!
//! 1. [`model`]: couplings in recoil units and the mean-field steady state.
//! 2. [`fluctuations`]: the linear stability matrix of that steady state, its
//!    biorthogonal quasi-normal-mode decomposition and the noise-driven
//!    second moments of the fluctuations.
//! 3. [`groundstate`]: the lossless (`kappa = 0`) counterpart, obtained by
//!    symplectic (Bogoliubov) diagonalization of the same matrix.
//! 4. [`entanglement`]: quadrature covariance and logarithmic negativity.
//! 5. [`analysis`]: parameter scans, critical-exponent fits and tables.
//!
//! [`oracle`] holds independent brute-force references (a Lyapunov solve and
//! a truncated Fock-space diagonalization) and [`verify`] bundles them into
//! a pass/fail report. All frequencies are in units of the recoil frequency.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod fluctuations;
pub mod groundstate;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use fluctuations::{
    build_stability_matrix, decompose, mode_correlations, observables, system_moments,
    NoiseSpec, QuasiNormalSystem, SecondMoments, StabilityMatrix,
};
pub use model::{critical_pump, solve_mean_field, MeanField, ModelParams, Phase, OMEGA_R};
