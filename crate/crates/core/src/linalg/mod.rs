//! Small dense complex linear algebra used by the fluctuation analysis.
//!
//! Everything here works on the fixed 4x4 basis `[da, da^dag, db, db^dag]`
//! except the eigensolver, which accepts any square matrix.

mod eigen;
mod refine;

pub use eigen::{eig, Eigen};
pub use refine::refined_eigensystem;

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat4 = Matrix4<C64>;
pub type CVec4 = Vector4<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Permutation swapping each operator with its adjoint slot (1<->2, 3<->4).
pub fn adjoint_swap() -> CMat4 {
    let mut t = CMat4::zeros();
    t[(0, 1)] = ONE;
    t[(1, 0)] = ONE;
    t[(2, 3)] = ONE;
    t[(3, 2)] = ONE;
    t
}

/// Bosonic metric `diag(1, -1, 1, -1)`.
pub fn metric() -> CMat4 {
    CMat4::from_diagonal(&CVec4::new(ONE, -ONE, ONE, -ONE))
}

/// Canonical commutator matrix `[R_i, R_j]` for `R = [a, a^dag, b, b^dag]`.
pub fn commutator_form() -> CMat4 {
    let mut w = CMat4::zeros();
    w[(0, 1)] = ONE;
    w[(1, 0)] = -ONE;
    w[(2, 3)] = ONE;
    w[(3, 2)] = -ONE;
    w
}

/// `J conj(v)`: the vector whose components are the adjoints of `v`'s.
pub fn adjoint_partner(v: &CVec4) -> CVec4 {
    CVec4::new(v[1].conj(), v[0].conj(), v[3].conj(), v[2].conj())
}

pub fn max_abs<R: nalgebra::Dim, Cc: nalgebra::Dim, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral condition number `sigma_max / sigma_min`; infinite when singular.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn to_dynamic(m: &CMat4) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

pub fn to_fixed(m: &DMatrix<C64>) -> CMat4 {
    assert_eq!(m.shape(), (4, 4));
    CMat4::from_fn(|i, j| m[(i, j)])
}
