//! Eigenvalue branches of `M` along a pump scan.
//!
//! Branches are followed by nearest-neighbour matching in the complex plane.
//! The "minus" pair is the atom-like pair (the less damped pair at the first
//! grid point, `+-i omega_r` at `y = 0`); the "plus" pair is photon-like.
//! Runs of grid points on which the minus pair is real are reported as
//! intervals whose edges are refined by bisection and tested for
//! defectiveness.

use super::{build_stability_matrix, conjugate_pairing, decompose, defectiveness};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat4, C64};
use crate::model::{solve_mean_field, ModelParams};

/// `|Im lambda| <= REAL_TOL * max(1, |lambda|)` counts as real.
pub const REAL_TOL: f64 = 1e-9;

/// Indices into [`SpectrumPoint::lambdas`].
pub const MINUS: [usize; 2] = [0, 1];
pub const PLUS: [usize; 2] = [2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    Defective,
    /// Tracking could not separate two equally good assignments.
    Ambiguous,
    Failed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Defective => "defective",
            PointStatus::Ambiguous => "ambiguous",
            PointStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub y: f64,
    /// Tracked branches, ordered `[minus_0, minus_1, plus_0, plus_1]`.
    pub lambdas: [C64; 4],
    pub condition: f64,
    pub status: PointStatus,
}

impl SpectrumPoint {
    pub fn minus_is_real(&self) -> bool {
        MINUS.iter().all(|&k| is_real(self.lambdas[k]))
    }
}

/// One edge of an interval on which the minus pair is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEdge {
    pub y: f64,
    pub condition: f64,
    /// `decompose` refused the matrix at the refined edge.
    pub defective: bool,
    /// Distance between the two minus eigenvalues at the edge.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealInterval {
    /// `None` when the interval starts at the first grid point.
    pub lower: Option<IntervalEdge>,
    /// `None` when the interval reaches the last grid point.
    pub upper: Option<IntervalEdge>,
    pub first_index: usize,
    pub last_index: usize,
}

impl RealInterval {
    pub fn is_finite(&self) -> bool {
        self.lower.is_some() && self.upper.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumScan {
    pub points: Vec<SpectrumPoint>,
    pub real_intervals: Vec<RealInterval>,
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= REAL_TOL * z.norm().max(1.0)
}

fn matrix_at(base: &ModelParams, y: f64) -> Result<CMat4> {
    let p = base.with_y(y);
    let mf = solve_mean_field(&p)?;
    Ok(build_stability_matrix(&p, &mf)?.m)
}

fn eigensystem(base: &ModelParams, y: f64) -> Result<([C64; 4], CMat4)> {
    let e = linalg::eig(&linalg::to_dynamic(&matrix_at(base, y)?))?;
    let mut values = [C64::new(0.0, 0.0); 4];
    values.copy_from_slice(&e.values);
    Ok((values, linalg::to_fixed(&e.vectors)))
}

/// Initial branch labelling: the pair with the larger real part is "minus";
/// within a pair the member with non-negative imaginary part comes first.
fn initial_order(values: &[C64; 4]) -> [usize; 4] {
    let pairing = conjugate_pairing(values).unwrap_or([1, 0, 3, 2]);
    let mut pairs: Vec<[usize; 2]> = Vec::new();
    let mut seen = [false; 4];
    for k in 0..4 {
        if seen[k] {
            continue;
        }
        let p = if pairing[k] == k {
            // self-conjugate: pair with the nearest other self-conjugate value
            (0..4)
                .filter(|&l| l != k && !seen[l] && pairing[l] == l)
                .min_by(|&a, &b| (values[a] - values[k]).norm().total_cmp(&(values[b] - values[k]).norm()))
                .unwrap_or(k)
        } else {
            pairing[k]
        };
        seen[k] = true;
        seen[p] = true;
        let pair = if values[k].im >= values[p].im { [k, p] } else { [p, k] };
        pairs.push(pair);
    }
    if pairs.len() != 2 {
        let mut idx = [0, 1, 2, 3];
        idx.sort_by(|&a, &b| values[b].re.total_cmp(&values[a].re));
        return idx;
    }
    let score = |pair: &[usize; 2]| values[pair[0]].re + values[pair[1]].re;
    if score(&pairs[1]) > score(&pairs[0]) {
        pairs.swap(0, 1);
    }
    [pairs[0][0], pairs[0][1], pairs[1][0], pairs[1][1]]
}

/// Assignment of new eigenpairs to previous branches.
fn track(prev: &[C64; 4], prev_vecs: &CMat4, values: &[C64; 4], vecs: &CMat4) -> ([usize; 4], bool) {
    let mut scored: Vec<([usize; 4], f64)> = permutations4()
        .into_iter()
        .map(|perm| {
            let cost = (0..4).map(|b| (values[perm[b]] - prev[b]).norm()).sum::<f64>();
            (perm, cost)
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));
    let best = scored[0].1;
    let tie = 1e-12 * (1.0 + best);
    let tied: Vec<[usize; 4]> = scored.iter().take_while(|s| s.1 - best <= tie).map(|s| s.0).collect();
    if tied.len() == 1 {
        return (tied[0], false);
    }
    let overlap = |perm: &[usize; 4]| {
        (0..4).map(|b| prev_vecs.column(b).dotc(&vecs.column(perm[b])).norm()).sum::<f64>()
    };
    let mut by_overlap: Vec<([usize; 4], f64)> = tied.iter().map(|p| (*p, overlap(p))).collect();
    by_overlap.sort_by(|a, b| b.1.total_cmp(&a.1));
    let ambiguous = (by_overlap[0].1 - by_overlap[1].1).abs() <= 1e-12;
    (by_overlap[0].0, ambiguous)
}

fn count_real(base: &ModelParams, y: f64) -> Result<usize> {
    Ok(eigensystem(base, y)?.0.iter().filter(|z| is_real(**z)).count())
}

/// Squared splitting `(l1 - l2)^2 = (l1 + l2)^2 - 4 l1 l2` of the two
/// eigenvalues nearest `center`. Unlike the splitting itself it is a smooth,
/// well-conditioned function of `y` through a coalescence: positive when
/// the pair is real, negative when it is complex.
fn squared_splitting(base: &ModelParams, y: f64, center: C64) -> Result<f64> {
    let (mut values, _) = eigensystem(base, y)?;
    values.sort_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()));
    let (a, b) = (values[0], values[1]);
    Ok(((a + b) * (a + b) - a * b * 4.0).re)
}

/// Number of representable values probed on each side of the located
/// coalescence.
const EDGE_PROBE_ULPS: u64 = 4;

/// Locates the coalescence between a grid point where the minus pair is
/// complex and one where it is real, then probes the matrix there.
fn refine_edge(base: &ModelParams, complex_y: f64, real_y: f64) -> Result<IntervalEdge> {
    // coarse bracket on the count of real eigenvalues
    let real_count = count_real(base, real_y)?;
    let (mut c, mut r) = (complex_y, real_y);
    for _ in 0..200 {
        let mid = 0.5 * (c + r);
        if mid == c || mid == r {
            break;
        }
        if count_real(base, mid)? >= real_count {
            r = mid;
        } else {
            c = mid;
        }
    }
    // the real-count test stalls where rounding noise hides the splitting;
    // the sign of the squared splitting keeps converging
    let (values, _) = eigensystem(base, r)?;
    let center = {
        let mut best = (f64::INFINITY, C64::new(0.0, 0.0));
        for k in 0..4 {
            for l in (k + 1)..4 {
                let d = (values[k] - values[l]).norm();
                if d < best.0 {
                    best = (d, (values[k] + values[l]) * 0.5);
                }
            }
        }
        best.1
    };
    let (mut c, mut r) = (complex_y, real_y);
    for _ in 0..200 {
        let mid = 0.5 * (c + r);
        if mid == c || mid == r {
            break;
        }
        if squared_splitting(base, mid, center)? > 0.0 {
            r = mid;
        } else {
            c = mid;
        }
    }
    let mut best: Option<IntervalEdge> = None;
    let step = |y: f64, up: bool| f64::from_bits(if up { y.to_bits() + 1 } else { y.to_bits() - 1 });
    let mut probes = vec![r];
    let (mut lo, mut hi) = (r, r);
    for _ in 0..EDGE_PROBE_ULPS {
        lo = step(lo, false);
        hi = step(hi, true);
        probes.push(lo);
        probes.push(hi);
    }
    for y in probes {
        let m = matrix_at(base, y)?;
        let e = linalg::eig(&linalg::to_dynamic(&m))?;
        let vecs = linalg::to_fixed(&e.vectors);
        let (condition, _) = defectiveness(&m, &e.values, &vecs);
        let gap = min_gap(&e.values);
        let defective = matches!(super::decompose_matrix(&m), Err(Error::DefectiveMatrix { .. }));
        let edge = IntervalEdge { y, condition, defective, gap };
        if best.is_none_or(|b| edge.condition > b.condition) {
            best = Some(edge);
        }
    }
    Ok(best.expect("at least one probe"))
}

fn min_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for k in 0..values.len() {
        for l in (k + 1)..values.len() {
            gap = gap.min((values[k] - values[l]).norm());
        }
    }
    gap
}

/// Tracked spectrum over a sorted `ys` grid at fixed `(delta_c, kappa, u)`.
pub fn spectrum_scan(base: &ModelParams, ys: &[f64]) -> Result<SpectrumScan> {
    if ys.is_empty() {
        return Err(Error::InvalidGrid("empty pump grid".into()));
    }
    if ys.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid("pump grid must be strictly increasing".into()));
    }
    let raw: Vec<Result<([C64; 4], CMat4)>> = {
        use rayon::prelude::*;
        ys.par_iter().map(|&y| eigensystem(base, y)).collect()
    };

    let mut points = Vec::with_capacity(ys.len());
    let mut prev: Option<([C64; 4], CMat4)> = None;
    for (&y, res) in ys.iter().zip(raw) {
        let (values, vecs) = match res {
            Ok(v) => v,
            Err(_) => {
                let nan = C64::new(f64::NAN, f64::NAN);
                points.push(SpectrumPoint { y, lambdas: [nan; 4], condition: f64::NAN, status: PointStatus::Failed });
                continue;
            }
        };
        let (order, ambiguous) = match &prev {
            None => (initial_order(&values), false),
            Some((pv, pvec)) => track(pv, pvec, &values, &vecs),
        };
        let lambdas = order.map(|k| values[k]);
        let ordered_vecs = CMat4::from_fn(|i, b| vecs[(i, order[b])]);
        let (condition, defective) = defectiveness(&matrix_at(base, y)?, &lambdas, &ordered_vecs);
        let status = if defective {
            PointStatus::Defective
        } else if ambiguous {
            PointStatus::Ambiguous
        } else {
            PointStatus::Ok
        };
        points.push(SpectrumPoint { y, lambdas, condition, status });
        prev = Some((lambdas, ordered_vecs));
    }

    let mut real_intervals = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if points[i].status == PointStatus::Failed || !points[i].minus_is_real() {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < points.len() && points[i + 1].status != PointStatus::Failed && points[i + 1].minus_is_real() {
            i += 1;
        }
        let end = i;
        let lower = if start > 0 && points[start - 1].status != PointStatus::Failed {
            Some(refine_edge(base, points[start - 1].y, points[start].y)?)
        } else {
            None
        };
        let upper = if end + 1 < points.len() && points[end + 1].status != PointStatus::Failed {
            Some(refine_edge(base, points[end + 1].y, points[end].y)?)
        } else {
            None
        };
        real_intervals.push(RealInterval { lower, upper, first_index: start, last_index: end });
        i += 1;
    }
    Ok(SpectrumScan { points, real_intervals })
}

/// Convenience: decomposition succeeds away from the interval edges.
pub fn is_diagonalizable(base: &ModelParams, y: f64) -> bool {
    let p = base.with_y(y);
    solve_mean_field(&p)
        .and_then(|mf| build_stability_matrix(&p, &mf))
        .and_then(|m| decompose(&m))
        .is_ok()
}

/// All 24 orderings of four indices.
fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn base() -> ModelParams {
        ModelParams::new(-2.0, 2.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn starts_from_uncoupled_frequencies() {
        let scan = spectrum_scan(&base(), &[0.0, 0.1]).unwrap();
        let l = scan.points[0].lambdas;
        assert!((l[0] - I).norm() < 1e-12);
        assert!((l[1] + I).norm() < 1e-12);
        assert!((l[2] - C64::new(-2.0, 2.0)).norm() < 1e-12);
        assert!((l[3] - C64::new(-2.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn smallest_decay_rate_closes_at_threshold() {
        let ys: Vec<f64> = (0..=200).map(|i| 2.0 * i as f64 / 200.0).collect();
        let scan = spectrum_scan(&base(), &ys).unwrap();
        let last = scan.points.last().unwrap();
        let slowest = last.lambdas.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        assert!(slowest < 1e-12);
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(matches!(spectrum_scan(&base(), &[1.0, 0.5]), Err(Error::InvalidGrid(_))));
        assert!(matches!(spectrum_scan(&base(), &[]), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn real_interval_edges_are_defective() {
        let ys: Vec<f64> = (0..=240).map(|i| 2.4 * i as f64 / 240.0).collect();
        let scan = spectrum_scan(&base(), &ys).unwrap();
        assert_eq!(scan.real_intervals.len(), 1);
        let iv = &scan.real_intervals[0];
        assert!(iv.is_finite());
        for edge in [iv.lower.unwrap(), iv.upper.unwrap()] {
            assert!(edge.defective, "{edge:?}");
            assert!(edge.condition > crate::fluctuations::DEFECTIVE_CONDITION);
            assert!(!is_diagonalizable(&base(), edge.y));
        }
        assert!(is_diagonalizable(&base(), 0.5 * (iv.lower.unwrap().y + iv.upper.unwrap().y) - 0.03));
    }

    #[test]
    fn twenty_four_permutations() {
        assert_eq!(permutations4().len(), 24);
    }
}
