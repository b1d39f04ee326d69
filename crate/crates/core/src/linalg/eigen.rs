//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! Wilkinson-shifted QR sweeps to a complex Schur form, and eigenvectors by
//! back-substitution in the triangular factor.

use nalgebra::{DMatrix, DVector};

use super::{C64, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues and unit-norm right eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: DMatrix<C64>,
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

pub fn eig(a: &DMatrix<C64>) -> Result<Eigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NumericalFailure("eigensolver needs a square matrix".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("non-finite matrix entry".into()));
    }
    let (mut h, mut z) = hessenberg(a);
    schur_sweeps(&mut h, &mut z)?;
    let vectors = schur_vectors(&h, &z);
    let values = (0..n).map(|k| h[(k, k)]).collect();
    Ok(Eigen { values, vectors })
}

/// Returns `(H, Q)` with `A = Q H Q^dag` and `H` upper Hessenberg.
fn hessenberg(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DMatrix::<C64>::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x: DVector<C64> = h.view((k + 1, k), (n - k - 1, 1)).column(0).into_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        v /= C64::new(vnorm, 0.0);
        // P = I - 2 v v^dag acting on indices k+1..n
        let m = n - k - 1;
        let two = C64::new(2.0, 0.0);
        // H <- P H
        for col in 0..n {
            let mut dot = ZERO;
            for i in 0..m {
                dot += v[i].conj() * h[(k + 1 + i, col)];
            }
            for i in 0..m {
                h[(k + 1 + i, col)] -= two * v[i] * dot;
            }
        }
        // H <- H P, Q <- Q P
        for mat in [&mut h, &mut q] {
            for row in 0..n {
                let mut dot = ZERO;
                for i in 0..m {
                    dot += mat[(row, k + 1 + i)] * v[i];
                }
                for i in 0..m {
                    mat[(row, k + 1 + i)] -= two * dot * v[i].conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn schur_sweeps(h: &mut DMatrix<C64>, z: &mut DMatrix<C64>) -> Result<()> {
    let n = h.nrows();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let scale = h.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the top of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= eps * eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        total += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE || total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::NumericalFailure("QR sweeps did not converge".into()));
        }

        let shift = if sweeps.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for col in k..n {
                let x = h[(k, col)];
                let y = h[(k + 1, col)];
                h[(k, col)] = x * c + s * y;
                h[(k + 1, col)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            let rows = (k + 2).min(hi + 1);
            for row in 0..rows {
                let x = h[(row, k)];
                let y = h[(row, k + 1)];
                h[(row, k)] = x * c + y * s.conj();
                h[(row, k + 1)] = -x * s + y * c;
            }
            for row in 0..n {
                let x = z[(row, k)];
                let y = z[(row, k + 1)];
                z[(row, k)] = x * c + y * s.conj();
                z[(row, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvectors of `A = Z T Z^dag` from the triangular factor `T`.
fn schur_vectors(t: &DMatrix<C64>, z: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let norm = t.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let small = (norm * f64::EPSILON).max(f64::MIN_POSITIVE);
    let mut out = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = DVector::<C64>::zeros(n);
        x[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut sum = ZERO;
            for m in (j + 1)..=k {
                sum += t[(j, m)] * x[m];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            x[j] = -sum / denom;
        }
        let mut v = z * x;
        let vn = v.norm();
        v /= C64::new(vn, 0.0);
        out.set_column(k, &v);
    }
    out
}
