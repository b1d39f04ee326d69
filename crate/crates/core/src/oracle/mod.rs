//! Brute-force references for the eigenmode and Bogoliubov routes.
//!
//! Neither oracle touches the quasi-normal-mode decomposition: the
//! Lyapunov solve works on the vectorized moment equation and uses the
//! linear-algebra crate's own Schur form for the stability test, and the
//! Fock oracle diagonalizes the quadratic Hamiltonian as an operator.

mod fock;
mod lyapunov;

pub use fock::{fock_ground_state, FockCutoffs, FockGroundState, FockSolution};
pub use lyapunov::{lyapunov_moments, lyapunov_residual};
