//! Extended-precision eigenvectors for nearly defective 4x4 matrices.
//!
//! Near a coalescence the double-precision eigensolver resolves the close
//! pair only to about `sqrt(eps)`, which is the same order as their true
//! splitting. Here the characteristic polynomial of the (exactly
//! representable) matrix is formed in double-double arithmetic, the isolated
//! roots are polished by Newton's method, the close pair is taken from the
//! deflated quadratic, and each eigenvector is a column of the adjugate of
//! `M - lambda`.

use num_complex::Complex;
use twofloat::TwoFloat;

use super::{CMat4, C64};

type Dd = TwoFloat;
type Cdd = Complex<Dd>;
type Mat = [[Cdd; 4]; 4];

fn lift(z: C64) -> Cdd {
    Cdd::new(Dd::from(z.re), Dd::from(z.im))
}

fn lower(z: Cdd) -> C64 {
    C64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

// `TwoFloat / TwoFloat` in twofloat 0.8 loses about half the extra digits,
// so quotients go through a Newton-corrected reciprocal.
fn recip(b: Dd) -> Dd {
    let r0 = Dd::from(1.0 / b.hi());
    r0 + r0 * (Dd::from(1.0) - b * r0)
}

fn div(a: Dd, b: Dd) -> Dd {
    let q = a * recip(b);
    q + (a - b * q) * recip(b)
}

fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let inv = recip(b.norm_sqr());
    let n = a * b.conj();
    Cdd::new(n.re * inv, n.im * inv)
}

fn csqrt(z: Cdd) -> Cdd {
    let r = z.norm_sqr().sqrt();
    let half = Dd::from(0.5);
    if r.hi() == 0.0 {
        return zero();
    }
    if z.re.hi() >= 0.0 {
        let t = ((r + z.re) * half).sqrt();
        Cdd::new(t, div(z.im * half, t))
    } else {
        let t = ((r - z.re) * half).sqrt();
        let im = if z.im.hi() < 0.0 { -t } else { t };
        Cdd::new(div(z.im.abs() * half, t), im)
    }
}

fn zero() -> Cdd {
    Cdd::new(Dd::from(0.0), Dd::from(0.0))
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = zero();
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

/// Coefficients `[c0, c1, c2, c3]` of `det(lambda - M) = lambda^4 + c3 lambda^3 + ...`
/// by the Faddeev-LeVerrier recursion.
fn char_poly(m: &Mat) -> [Cdd; 4] {
    let mut c = [zero(); 4];
    let mut mk = *m;
    for k in 1..=4usize {
        if k > 1 {
            let mut shifted = mk;
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += c[4 - k + 1];
            }
            mk = mat_mul(m, &shifted);
        }
        let tr = mk[0][0] + mk[1][1] + mk[2][2] + mk[3][3];
        c[4 - k] = -tr * recip(Dd::from(k as f64));
    }
    c
}

fn eval(c: &[Cdd; 4], x: Cdd) -> (Cdd, Cdd) {
    // Horner for p and p'
    let mut p = Cdd::new(Dd::from(1.0), Dd::from(0.0));
    let mut dp = zero();
    for k in (0..4).rev() {
        dp = dp * x + p;
        p = p * x + c[k];
    }
    (p, dp)
}

fn newton(c: &[Cdd; 4], mut x: Cdd) -> Cdd {
    for _ in 0..8 {
        let (p, dp) = eval(c, x);
        if dp.norm_sqr() == Dd::from(0.0) {
            break;
        }
        x -= cdiv(p, dp);
    }
    x
}

/// Divides monic `lambda^n + ...` (coefficients high to low, leading one
/// implied) by `lambda - r`.
fn deflate(high_to_low: &[Cdd], r: Cdd) -> Vec<Cdd> {
    let mut out = Vec::with_capacity(high_to_low.len() - 1);
    let mut acc = Cdd::new(Dd::from(1.0), Dd::from(0.0));
    for &a in &high_to_low[..high_to_low.len() - 1] {
        acc = acc * r + a;
        out.push(acc);
    }
    out
}

fn det3(a: [[Cdd; 3]; 3]) -> Cdd {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn cofactor(a: &Mat, row: usize, col: usize) -> Cdd {
    let mut minor = [[zero(); 3]; 3];
    let rows: Vec<usize> = (0..4).filter(|&r| r != row).collect();
    let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            minor[i][j] = a[r][c];
        }
    }
    let d = det3(minor);
    if (row + col).is_multiple_of(2) {
        d
    } else {
        -d
    }
}

/// Unit eigenvector for `lambda`: the largest column of `adj(M - lambda)`.
fn null_vector(m: &Mat, lambda: Cdd) -> Option<[Cdd; 4]> {
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut best: Option<([Cdd; 4], Dd)> = None;
    for j in 0..4 {
        // column j of the adjugate holds the cofactors of row j
        let v = [cofactor(&a, j, 0), cofactor(&a, j, 1), cofactor(&a, j, 2), cofactor(&a, j, 3)];
        let n = v.iter().fold(Dd::from(0.0), |s, z| s + z.norm_sqr());
        if best.as_ref().is_none_or(|b| n > b.1) {
            best = Some((v, n));
        }
    }
    let (v, n) = best?;
    if !(n.hi() > 0.0) || !n.hi().is_finite() {
        return None;
    }
    let norm = n.sqrt();
    let inv = recip(norm);
    Some(v.map(|z| Cdd::new(z.re * inv, z.im * inv)))
}

/// Eigenvalues and unit eigenvectors (columns) refined from the
/// double-precision estimates `approx`, in the same order.
pub fn refined_eigensystem(m: &CMat4, approx: &[C64]) -> Option<([C64; 4], CMat4)> {
    assert_eq!(approx.len(), 4);
    let md: Mat = std::array::from_fn(|i| std::array::from_fn(|j| lift(m[(i, j)])));
    let c = char_poly(&md);

    let (mut k0, mut l0, mut gap) = (0, 1, f64::INFINITY);
    for k in 0..4 {
        for l in (k + 1)..4 {
            let d = (approx[k] - approx[l]).norm();
            if d < gap {
                (k0, l0, gap) = (k, l, d);
            }
        }
    }
    let isolated: Vec<usize> = (0..4).filter(|&k| k != k0 && k != l0).collect();
    let mut roots = [zero(); 4];
    for &k in &isolated {
        roots[k] = newton(&c, lift(approx[k]));
    }

    let mut q = vec![c[3], c[2], c[1], c[0]];
    for &k in &isolated {
        q = deflate(&q, roots[k]);
    }
    // lambda^2 + b lambda + c
    let (b, cc) = (q[0], q[1]);
    let four = Dd::from(4.0);
    let disc = b * b - cc * four;
    let s = csqrt(disc);
    let plus = b + s;
    let minus = b - s;
    let big = if plus.norm_sqr() >= minus.norm_sqr() { plus } else { minus };
    let (r1, r2) = if big.norm_sqr() == Dd::from(0.0) {
        (zero(), zero())
    } else {
        let r1 = -big * Dd::from(0.5);
        (r1, cdiv(cc, r1))
    };
    let d11 = (lower(r1) - approx[k0]).norm() + (lower(r2) - approx[l0]).norm();
    let d12 = (lower(r2) - approx[k0]).norm() + (lower(r1) - approx[l0]).norm();
    if d11 <= d12 {
        roots[k0] = r1;
        roots[l0] = r2;
    } else {
        roots[k0] = r2;
        roots[l0] = r1;
    }

    let mut vecs = CMat4::zeros();
    for k in 0..4 {
        let v = null_vector(&md, roots[k])?;
        for i in 0..4 {
            vecs[(i, k)] = lower(v[i]);
        }
    }
    let values = roots.map(lower);
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some((values, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = CMat4::from_diagonal(&super::super::CVec4::new(
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(3.0, 1.0),
            C64::new(-1.0, 0.5),
        ));
        let approx = [C64::new(1.0, 1e-9), C64::new(2.0, 0.0), C64::new(3.0, 1.0), C64::new(-1.0, 0.5)];
        let (vals, vecs) = refined_eigensystem(&m, &approx).unwrap();
        for k in 0..4 {
            assert!((vals[k] - m[(k, k)]).norm() < 1e-15);
            assert!((vecs[(k, k)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn close_pair_resolved() {
        // [[a, 1], [eps, a]] has eigenvalues a +- sqrt(eps)
        let eps = 1e-20;
        let mut m = CMat4::zeros();
        m[(0, 0)] = C64::new(-1.0, 0.0);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(eps, 0.0);
        m[(1, 1)] = C64::new(-1.0, 0.0);
        m[(2, 2)] = C64::new(-3.0, 2.0);
        m[(3, 3)] = C64::new(-3.0, -2.0);
        let approx = [C64::new(-1.0, 0.0), C64::new(-1.0, 0.0), m[(2, 2)], m[(3, 3)]];
        let (vals, vecs) = refined_eigensystem(&m, &approx).unwrap();
        let split = (vals[0] - vals[1]).norm();
        // exact split 2e-10; the values are rounded to double on return
        assert!((split - 2e-10).abs() < 5e-16, "{split:e}");
        let residual = (m * vecs.column(0) - vecs.column(0) * vals[0]).norm();
        assert!(residual < 1e-14);
    }
}
