//! Ground state of the quadratic fluctuation Hamiltonian in a truncated
//! two-mode Fock space.
//!
//! `H = (1/2) sum_ij H_ij R_i^dag R_j` conserves the parity of
//! `n_a + n_b`, so only the even sector (which contains the vacuum) is
//! built. The lowest eigenpair is found by Lanczos iteration with full
//! reorthogonalization on the sparse matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fluctuations::build_stability_matrix;
use crate::groundstate::quadratic_hamiltonian;
use crate::linalg::{CMat4, C64};
use crate::model::{MeanField, ModelParams};

pub const MIN_CUTOFF: usize = 20;
/// Relative change of the observables allowed when the cutoffs are doubled.
pub const CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoffs {
    pub photon: usize,
    pub atom: usize,
}

impl Default for FockCutoffs {
    fn default() -> Self {
        Self { photon: 60, atom: 60 }
    }
}

impl FockCutoffs {
    pub fn doubled(self) -> Self {
        Self { photon: 2 * self.photon, atom: 2 * self.atom }
    }
}

/// Result at one pair of cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSolution {
    pub cutoffs: FockCutoffs,
    pub dimension: usize,
    pub delta_n: f64,
    pub n_photon: f64,
    pub energy: f64,
    pub hermiticity_error: f64,
    pub norm_error: f64,
    pub lanczos_steps: usize,
}

/// Base-cutoff result plus the doubled-cutoff check.
#[derive(Debug, Clone, PartialEq)]
pub struct FockGroundState {
    pub delta_n: f64,
    pub n_photon: f64,
    pub energy: f64,
    /// Largest relative change of `delta_n`, `n_photon` on doubling.
    pub convergence_delta: f64,
    pub base: FockSolution,
    pub doubled: FockSolution,
}

#[derive(Clone, Copy)]
enum Ladder {
    A,
    Adag,
    B,
    Bdag,
}

/// `R = [a, a^dag, b, b^dag]` and `R^dag`.
const R: [Ladder; 4] = [Ladder::A, Ladder::Adag, Ladder::B, Ladder::Bdag];
const R_DAG: [Ladder; 4] = [Ladder::Adag, Ladder::A, Ladder::Bdag, Ladder::B];

fn apply(op: Ladder, (na, nb): (usize, usize), cut: FockCutoffs) -> Option<((usize, usize), f64)> {
    match op {
        Ladder::A => (na > 0).then(|| ((na - 1, nb), (na as f64).sqrt())),
        Ladder::Adag => (na < cut.photon).then(|| ((na + 1, nb), ((na + 1) as f64).sqrt())),
        Ladder::B => (nb > 0).then(|| ((na, nb - 1), (nb as f64).sqrt())),
        Ladder::Bdag => (nb < cut.atom).then(|| ((na, nb + 1), ((nb + 1) as f64).sqrt())),
    }
}

struct Basis {
    states: Vec<(usize, usize)>,
    index: Vec<Option<usize>>,
    width: usize,
}

impl Basis {
    fn even(cut: FockCutoffs) -> Self {
        let width = cut.atom + 1;
        let mut states = Vec::new();
        let mut index = vec![None; (cut.photon + 1) * width];
        for na in 0..=cut.photon {
            for nb in 0..=cut.atom {
                if (na + nb) % 2 == 0 {
                    index[na * width + nb] = Some(states.len());
                    states.push((na, nb));
                }
            }
        }
        Self { states, index, width }
    }

    fn find(&self, (na, nb): (usize, usize)) -> usize {
        self.index[na * self.width + nb].expect("parity-conserving term")
    }
}

/// Compressed sparse rows.
struct Sparse {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Sparse {
    fn mul(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for idx in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[idx] * x[self.cols[idx]];
            }
            *out = acc;
        }
    }

    fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_start[r]..self.row_start[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(pos) => self.vals[span.start + pos],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.row_start.len() - 1 {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                let c = self.cols[idx];
                worst = worst.max((self.vals[idx] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn assemble(h: &CMat4, basis: &Basis, cut: FockCutoffs) -> Sparse {
    let n = basis.states.len();
    let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
    for (col, &state) in basis.states.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let coeff = h[(i, j)];
                if coeff.norm() == 0.0 {
                    continue;
                }
                let Some((mid, f1)) = apply(R[j], state, cut) else { continue };
                let Some((out, f2)) = apply(R_DAG[i], mid, cut) else { continue };
                rows[basis.find(out)].push((col, coeff * (0.5 * f1 * f2)));
            }
        }
    }
    let mut row_start = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_start.push(0);
    for mut row in rows {
        row.sort_by_key(|e| e.0);
        let mut k = 0;
        while k < row.len() {
            let c = row[k].0;
            let mut v = C64::new(0.0, 0.0);
            while k < row.len() && row[k].0 == c {
                v += row[k].1;
                k += 1;
            }
            cols.push(c);
            vals.push(v);
        }
        row_start.push(cols.len());
    }
    Sparse { row_start, cols, vals }
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (k, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(k).iter().cloned().collect())
}

/// Lowest eigenpair by Lanczos from the vacuum.
fn lanczos_ground(h: &Sparse, start: usize, max_steps: usize) -> Result<(f64, Vec<C64>, usize)> {
    let n = h.row_start.len() - 1;
    let scale = h.max_abs().max(1.0);
    let mut q: Vec<Vec<C64>> = Vec::new();
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[start] = C64::new(1.0, 0.0);
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let steps = max_steps.min(n);
    for j in 0..steps {
        h.mul(&v, &mut w);
        let a = dotc(&v, &w).re;
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= *vi * a;
        }
        if let (Some(prev), Some(&b)) = (q.last(), beta.last()) {
            for (wi, pi) in w.iter_mut().zip(prev.iter()) {
                *wi -= *pi * b;
            }
        }
        q.push(v.clone());
        for _ in 0..2 {
            for basis_vec in &q {
                let c = dotc(basis_vec, &w);
                for (wi, bi) in w.iter_mut().zip(basis_vec) {
                    *wi -= *bi * c;
                }
            }
        }
        let b = norm(&w);
        let check = (j + 1) % 10 == 0 || b < 1e-13 * scale || j + 1 == steps;
        if check {
            let (theta, s) = lowest_ritz(&alpha, &beta);
            let residual = b * s.last().copied().unwrap_or(0.0).abs();
            if residual < 1e-10 * scale || b < 1e-13 * scale {
                let mut psi = vec![C64::new(0.0, 0.0); n];
                for (coef, basis_vec) in s.iter().zip(&q) {
                    for (p, bv) in psi.iter_mut().zip(basis_vec) {
                        *p += *bv * *coef;
                    }
                }
                return Ok((theta, psi, j + 1));
            }
        }
        beta.push(b);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / b;
        }
    }
    Err(Error::NumericalFailure(format!("Lanczos did not converge in {steps} steps")))
}

fn solve_at(h: &CMat4, cut: FockCutoffs) -> Result<FockSolution> {
    let basis = Basis::even(cut);
    let sparse = assemble(h, &basis, cut);
    let hermiticity_error = sparse.hermiticity_error();
    if hermiticity_error > 1e-12 * sparse.max_abs().max(1.0) {
        return Err(Error::NumericalFailure(format!("truncated Hamiltonian not Hermitian ({hermiticity_error:e})")));
    }
    let (energy, psi, steps) = lanczos_ground(&sparse, basis.find((0, 0)), 3000)?;
    let nrm = norm(&psi);
    let mut delta_n = 0.0;
    let mut n_photon = 0.0;
    for (amp, &(na, nb)) in psi.iter().zip(&basis.states) {
        let p = amp.norm_sqr() / (nrm * nrm);
        n_photon += p * na as f64;
        delta_n += p * nb as f64;
    }
    Ok(FockSolution {
        cutoffs: cut,
        dimension: basis.states.len(),
        delta_n,
        n_photon,
        energy,
        hermiticity_error,
        norm_error: (nrm - 1.0).abs(),
        lanczos_steps: steps,
    })
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Ground-state depletion and photon number from the truncated Fock space,
/// with a mandatory doubled-cutoff convergence check.
pub fn fock_ground_state(params: &ModelParams, mf: &MeanField, cutoffs: FockCutoffs) -> Result<FockGroundState> {
    if params.kappa != 0.0 {
        return Err(Error::InvalidParams("Fock oracle requires kappa = 0".into()));
    }
    if cutoffs.photon < MIN_CUTOFF || cutoffs.atom < MIN_CUTOFF {
        return Err(Error::InvalidParams(format!("Fock cutoffs must be >= {MIN_CUTOFF}")));
    }
    let m = build_stability_matrix(params, mf)?;
    let h = quadratic_hamiltonian(&m)?;
    let base = solve_at(&h, cutoffs)?;
    let doubled = solve_at(&h, cutoffs.doubled())?;
    let convergence_delta =
        relative_change(base.delta_n, doubled.delta_n).max(relative_change(base.n_photon, doubled.n_photon));
    if convergence_delta > CONVERGENCE_TOL {
        return Err(Error::CutoffTooSmall { relative_delta: convergence_delta });
    }
    Ok(FockGroundState {
        delta_n: base.delta_n,
        n_photon: base.n_photon,
        energy: base.energy,
        convergence_delta,
        base,
        doubled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{critical_pump, solve_mean_field};

    fn closed(ratio: f64) -> (ModelParams, MeanField) {
        let p = ModelParams::new(-2.0, 0.0, 0.0, 0.0).unwrap();
        let p = p.with_y(ratio * critical_pump(&p).unwrap());
        (p, solve_mean_field(&p).unwrap())
    }

    #[test]
    fn vacuum_at_zero_pump() {
        let (p, mf) = closed(0.0);
        let g = fock_ground_state(&p, &mf, FockCutoffs { photon: 20, atom: 20 }).unwrap();
        assert_eq!(g.delta_n, 0.0);
        assert_eq!(g.n_photon, 0.0);
        assert!(g.base.hermiticity_error < 1e-12);
    }

    #[test]
    fn energy_decreases_with_pump() {
        let cut = FockCutoffs { photon: 24, atom: 24 };
        let mut last = f64::INFINITY;
        for r in [0.0, 0.2, 0.4, 0.6, 0.8] {
            let (p, mf) = closed(r);
            let e = fock_ground_state(&p, &mf, cut).unwrap().energy;
            assert!(e < last, "r = {r}: {e} !< {last}");
            last = e;
        }
    }

    #[test]
    fn rejects_small_cutoffs_and_losses() {
        let (p, mf) = closed(0.3);
        assert!(fock_ground_state(&p, &mf, FockCutoffs { photon: 5, atom: 30 }).is_err());
        let lossy = p.with_kappa(1.0);
        assert!(fock_ground_state(&lossy, &mf, FockCutoffs::default()).is_err());
    }

    #[test]
    fn parity_sector_is_half_the_space() {
        let b = Basis::even(FockCutoffs { photon: 20, atom: 20 });
        assert_eq!(b.states.len(), (21 * 21usize).div_ceil(2));
    }
}
