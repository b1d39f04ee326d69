//! Pump scans, critical-exponent fits and figure tables.
//!
//! Every scan evaluates grid points independently (in parallel) and
//! assembles rows in grid order. Points that fail keep their row and carry
//! the failure in a `status` column.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::entanglement::{log_negativity, quad_covariance};
use crate::error::{Error, Result};
use crate::fluctuations::spectrum::{spectrum_scan, PointStatus};
use crate::fluctuations::{build_stability_matrix, steady_state, Observables, SecondMoments};
use crate::groundstate::ground_state;
use crate::linalg::{self, C64};
use crate::model::{critical_pump, solve_mean_field, MeanField, ModelParams};
use crate::table::{Cell, RowStatus, Table};

pub const MIN_FIT_POINTS: usize = 8;
pub const MIN_R_SQUARED: f64 = 0.999;
pub const POINTS_PER_SIDE: usize = 40;

/// Default fit window in `|1 - y/y_c|`.
pub fn default_window() -> (f64, f64) {
    ((-14.0f64).exp(), (-5.0f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Below => "below",
            Side::Above => "above",
        }
    }

    /// `y / y_c` at relative deviation `x`.
    pub fn ratio(self, x: f64) -> f64 {
        match self {
            Side::Below => 1.0 - x,
            Side::Above => 1.0 + x,
        }
    }
}

/// Which sides of the threshold a log-centered grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sides {
    Below,
    Above,
    Both,
}

impl Sides {
    pub fn list(self) -> &'static [Side] {
        match self {
            Sides::Below => &[Side::Below],
            Sides::Above => &[Side::Above],
            Sides::Both => &[Side::Below, Side::Above],
        }
    }
}

impl FromStr for Sides {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "below" => Ok(Sides::Below),
            "above" => Ok(Sides::Above),
            "both" => Ok(Sides::Both),
            other => Err(Error::InvalidParams(format!("side must be below, above or both, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub side: Side,
    pub n_points: usize,
    /// `r_squared` below [`MIN_R_SQUARED`]; the slope should not be trusted.
    pub poor_fit: bool,
}

/// Least-squares line through `(ln x, ln value)` for the points with `x`
/// inside `window` (inclusive, with a relative slack of `1e-9`).
pub fn exponent_fit(curve: &[(f64, f64)], window: (f64, f64), side: Side) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidCurve(format!("bad fit window ({lo}, {hi})")));
    }
    let slack = 1e-9;
    let mut pts = Vec::new();
    for &(x, v) in curve {
        if x >= lo * (1.0 - slack) && x <= hi * (1.0 + slack) {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidCurve(format!("non-positive value {v} at x = {x}")));
            }
            pts.push((x.ln(), v.ln()));
        }
    }
    let n = pts.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InvalidCurve(format!("{n} points in window, need {MIN_FIT_POINTS}")));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidCurve("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ExponentFit { slope, intercept, r_squared, window, side, n_points: n, poor_fit: r_squared < MIN_R_SQUARED })
}

/// `n` log-spaced values from `min` to `max` inclusive.
pub fn log_spaced(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// A grid endpoint: a plain number or a multiple of `y_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub value: f64,
    pub times_yc: bool,
}

impl Endpoint {
    pub fn resolve(self, yc: f64) -> f64 {
        if self.times_yc {
            self.value * yc
        } else {
            self.value
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;
    /// Accepts `1.5`, `yc`, `2yc`, `0.9yc` and `0.9*yc`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidParams(format!("cannot parse pump value {s:?}"));
        if let Some(coef) = t.strip_suffix("yc") {
            let coef = coef.trim().trim_end_matches('*').trim();
            let value = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            return Ok(Endpoint { value, times_yc: true });
        }
        t.parse::<f64>().map(|value| Endpoint { value, times_yc: false }).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    Linear { start: Endpoint, stop: Endpoint, count: usize },
    /// Log-spaced deviations `|1 - y/y_c|` over `window`, `count` per side.
    LogCentered { sides: Sides, window: (f64, f64), count: usize },
    Points(Vec<Endpoint>),
}

impl GridSpec {
    pub fn single(y: Endpoint) -> Self {
        GridSpec::Points(vec![y])
    }

    pub fn exponent(sides: Sides) -> Self {
        GridSpec::LogCentered { sides, window: default_window(), count: POINTS_PER_SIDE }
    }

    /// Grid points in ascending order of `y` for the linear and
    /// log-centered forms; explicit points keep their order.
    pub fn resolve(&self, yc: f64) -> Result<Vec<GridPoint>> {
        match self {
            GridSpec::Linear { start, stop, count } => {
                let (a, b) = (start.resolve(yc), stop.resolve(yc));
                if *count == 0 || !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidGrid(format!("bad linear grid {a}:{b}:{count}")));
                }
                if *count == 1 {
                    return Ok(vec![GridPoint::plain(a)]);
                }
                Ok((0..*count).map(|k| GridPoint::plain(a + (b - a) * k as f64 / (*count - 1) as f64)).collect())
            }
            GridSpec::LogCentered { sides, window, count } => {
                let (lo, hi) = *window;
                if !(lo > 0.0 && hi > lo && *count >= 2) {
                    return Err(Error::InvalidGrid(format!("bad log-centered window ({lo}, {hi}) x {count}")));
                }
                if sides.list().contains(&Side::Below) && hi >= 1.0 {
                    return Err(Error::InvalidGrid("below-threshold window must stay under 1".into()));
                }
                let xs = log_spaced(lo, hi, *count);
                let mut out = Vec::new();
                for &side in sides.list() {
                    let ordered: Vec<f64> = match side {
                        Side::Below => xs.iter().rev().copied().collect(),
                        Side::Above => xs.clone(),
                    };
                    out.extend(
                        ordered.into_iter().map(|x| GridPoint { y: yc * side.ratio(x), deviation: Some((side, x)) }),
                    );
                }
                Ok(out)
            }
            GridSpec::Points(ps) => {
                if ps.is_empty() {
                    return Err(Error::InvalidGrid("no pump values".into()));
                }
                Ok(ps.iter().map(|e| GridPoint::plain(e.resolve(yc))).collect())
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    /// `start:stop:count`, e.g. `0:2yc:200`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParams(format!("grid must be start:stop:count, got {s:?}")));
        }
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParams(format!("bad grid count {:?}", parts[2])))?;
        Ok(GridSpec::Linear { start: parts[0].parse()?, stop: parts[1].parse()?, count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub y: f64,
    /// Side and exact `|1 - y/y_c|` for log-centered grids.
    pub deviation: Option<(Side, f64)>,
}

impl GridPoint {
    fn plain(y: f64) -> Self {
        Self { y, deviation: None }
    }
}

/// Fluctuations at one pump value: the noise-driven steady state for
/// `kappa > 0`, the Bogoliubov ground state for `kappa = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationPoint {
    pub mean_field: MeanField,
    pub moments: SecondMoments,
    pub observables: Observables,
}

pub fn fluctuations_at(params: &ModelParams) -> Result<FluctuationPoint> {
    if params.kappa == 0.0 {
        let g = ground_state(params)?;
        Ok(FluctuationPoint { mean_field: g.mean_field, moments: g.moments, observables: g.observables })
    } else {
        let s = steady_state(params)?;
        Ok(FluctuationPoint { mean_field: s.mean_field, moments: s.moments, observables: s.observables })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    DeltaN,
    NPhoton,
}

impl Observable {
    pub const ALL: [Observable; 2] = [Observable::DeltaN, Observable::NPhoton];

    pub fn as_str(self) -> &'static str {
        match self {
            Observable::DeltaN => "delta_N",
            Observable::NPhoton => "n_photon",
        }
    }

    pub fn of(self, o: &Observables) -> f64 {
        match self {
            Observable::DeltaN => o.delta_n,
            Observable::NPhoton => o.n_photon,
        }
    }
}

/// Observables along a log-centered grid on one side of `y_c`.
pub fn critical_curve(base: &ModelParams, side: Side, window: (f64, f64), count: usize) -> Result<Vec<(f64, Result<Observables>)>> {
    let yc = critical_pump(base)?;
    let grid_sides = match side {
        Side::Below => Sides::Below,
        Side::Above => Sides::Above,
    };
    let grid = GridSpec::LogCentered { sides: grid_sides, window, count }.resolve(yc)?;
    Ok(grid
        .par_iter()
        .map(|g| {
            let x = g.deviation.expect("log-centered").1;
            (x, fluctuations_at(&base.with_y(g.y)).map(|f| f.observables))
        })
        .collect())
}

/// Exponent of `observable` on one side of `y_c`. Failed grid points are
/// left out of the fit.
pub fn critical_exponent(base: &ModelParams, side: Side, observable: Observable, window: (f64, f64), count: usize) -> Result<ExponentFit> {
    let curve: Vec<(f64, f64)> = critical_curve(base, side, window, count)?
        .into_iter()
        .filter_map(|(x, r)| r.ok().map(|o| (x, observable.of(&o))))
        .collect();
    exponent_fit(&curve, window, side)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    /// Mean field only.
    MeanField,
    MeanAndFluct,
    Exponent,
    Entanglement,
    Spectrum,
}

impl ScanKind {
    pub fn columns(self) -> Vec<&'static str> {
        match self {
            ScanKind::MeanField => vec!["y", "y_over_yc", "phase", "alpha0_re", "alpha0_im", "alpha0_sq", "beta0_sq", "mu", "status"],
            ScanKind::MeanAndFluct => {
                vec!["y", "y_over_yc", "alpha0_re", "alpha0_im", "beta0_sq", "delta_N", "n_photon", "status"]
            }
            ScanKind::Exponent => vec!["side", "deviation", "y", "y_over_yc", "delta_N", "n_photon", "status"],
            ScanKind::Entanglement => vec!["y", "y_over_yc", "E_N", "nu_minus", "delta_N", "n_photon", "status"],
            ScanKind::Spectrum => vec![
                "point", "y", "y_over_yc", "minus0_re", "minus0_im", "minus1_re", "minus1_im", "plus0_re", "plus0_im",
                "plus1_re", "plus1_im", "minus_real", "condition", "tracking", "status",
            ],
        }
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScanKind::MeanField => "meanfield",
            ScanKind::MeanAndFluct => "correlations",
            ScanKind::Exponent => "exponent",
            ScanKind::Entanglement => "entanglement",
            ScanKind::Spectrum => "spectrum",
        };
        f.write_str(s)
    }
}

fn nan_row(width: usize) -> Vec<Cell> {
    vec![Cell::Float(f64::NAN); width]
}

fn status_of<T>(r: &Result<T>) -> RowStatus {
    match r {
        Ok(_) => RowStatus::Ok,
        Err(e) => RowStatus::from_error(e),
    }
}

fn point_row(kind: ScanKind, base: &ModelParams, g: &GridPoint, yc: f64) -> Vec<Cell> {
    let p = base.with_y(g.y);
    let head = vec![Cell::Float(g.y), Cell::Float(g.y / yc)];
    match kind {
        ScanKind::MeanField => {
            let r = solve_mean_field(&p);
            let mut row = head;
            match &r {
                Ok(mf) => row.extend([
                    Cell::text(mf.phase.as_str()),
                    mf.alpha0.re.into(),
                    mf.alpha0.im.into(),
                    mf.alpha0_sq().into(),
                    mf.beta0_sq().into(),
                    mf.mu.into(),
                ]),
                Err(_) => {
                    row.push(Cell::text(""));
                    row.extend(nan_row(5));
                }
            }
            row.push(status_of(&r).into());
            row
        }
        ScanKind::MeanAndFluct => {
            let r = fluctuations_at(&p);
            let mut row = head;
            // mean-field columns survive a fluctuation failure
            match (&r, solve_mean_field(&p)) {
                (Ok(f), _) => row.extend([
                    f.mean_field.alpha0.re.into(),
                    f.mean_field.alpha0.im.into(),
                    f.mean_field.beta0_sq().into(),
                    f.observables.delta_n.into(),
                    f.observables.n_photon.into(),
                ]),
                (Err(_), Ok(mf)) => {
                    row.extend([mf.alpha0.re.into(), mf.alpha0.im.into(), mf.beta0_sq().into()]);
                    row.extend(nan_row(2));
                }
                (Err(_), Err(_)) => row.extend(nan_row(5)),
            }
            row.push(status_of(&r).into());
            row
        }
        ScanKind::Exponent => {
            let (side, x) = g.deviation.map(|(s, x)| (s.as_str(), x)).unwrap_or(("", (1.0 - g.y / yc).abs()));
            let r = fluctuations_at(&p);
            let mut row = vec![Cell::text(side), x.into(), g.y.into(), (g.y / yc).into()];
            match &r {
                Ok(f) => row.extend([f.observables.delta_n.into(), f.observables.n_photon.into()]),
                Err(_) => row.extend(nan_row(2)),
            }
            row.push(status_of(&r).into());
            row
        }
        ScanKind::Entanglement => {
            let r = fluctuations_at(&p).and_then(|f| {
                let cov = quad_covariance(&f.moments)?;
                let en = log_negativity(&cov)?;
                let nu = cov.partial_transpose().nu_minus()?;
                Ok((f.observables, en, nu))
            });
            let mut row = head;
            match &r {
                Ok((o, en, nu)) => row.extend([(*en).into(), (*nu).into(), o.delta_n.into(), o.n_photon.into()]),
                Err(_) => row.extend(nan_row(4)),
            }
            row.push(status_of(&r).into());
            row
        }
        ScanKind::Spectrum => unreachable!("spectrum rows are built from the tracked scan"),
    }
}

fn spectrum_table(base: &ModelParams, grid: &[GridPoint], yc: f64) -> Result<Table> {
    let ys: Vec<f64> = grid.iter().map(|g| g.y).collect();
    let scan = spectrum_scan(base, &ys)?;
    let kind = ScanKind::Spectrum;
    let mut rows: Vec<(f64, usize, Vec<Cell>)> = Vec::new();
    for (i, pt) in scan.points.iter().enumerate() {
        let status = match pt.status {
            PointStatus::Ok | PointStatus::Ambiguous => RowStatus::Ok,
            PointStatus::Defective => RowStatus::Defective,
            PointStatus::Failed => RowStatus::Failed,
        };
        let tracking = if pt.status == PointStatus::Ambiguous { "ambiguous" } else { "ok" };
        rows.push((pt.y, 2 * i, lambda_row("grid", pt.y, yc, &pt.lambdas, pt.minus_is_real(), pt.condition, tracking, status)));
    }
    for iv in &scan.real_intervals {
        for (name, edge) in [("lower_edge", iv.lower), ("upper_edge", iv.upper)] {
            let Some(e) = edge else { continue };
            let lambdas = edge_eigenvalues(base, e.y);
            let status = if e.defective { RowStatus::Defective } else { RowStatus::Ok };
            let key = if name == "lower_edge" { 2 * iv.first_index - 1 } else { 2 * iv.last_index + 1 };
            rows.push((e.y, key, lambda_row(name, e.y, yc, &lambdas, true, e.condition, "ok", status)));
        }
    }
    rows.sort_by_key(|r| r.1);
    let mut t = Table::new(kind.columns());
    for (_, _, row) in rows {
        t.push(row);
    }
    Ok(t)
}

/// Eigenvalues at a refined edge, minus pair (larger real part) first.
fn edge_eigenvalues(base: &ModelParams, y: f64) -> [C64; 4] {
    let p = base.with_y(y);
    let nan = [C64::new(f64::NAN, f64::NAN); 4];
    let Ok(mf) = solve_mean_field(&p) else { return nan };
    let Ok(m) = build_stability_matrix(&p, &mf) else { return nan };
    let Ok(e) = linalg::eig(&linalg::to_dynamic(&m.m)) else { return nan };
    let mut v = e.values.clone();
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    [v[0], v[1], v[2], v[3]]
}

#[allow(clippy::too_many_arguments)]
fn lambda_row(point: &str, y: f64, yc: f64, l: &[C64; 4], minus_real: bool, condition: f64, tracking: &str, status: RowStatus) -> Vec<Cell> {
    let mut row = vec![Cell::text(point), y.into(), (y / yc).into()];
    for z in l {
        row.push(z.re.into());
        row.push(z.im.into());
    }
    row.extend([Cell::text(if minus_real { "true" } else { "false" }), condition.into(), Cell::text(tracking), status.into()]);
    row
}

/// One row per grid point (plus refined interval edges for spectra), in
/// grid order.
pub fn figure_scan(kind: ScanKind, base: &ModelParams, grid: &GridSpec) -> Result<Table> {
    base.validate()?;
    let yc = critical_pump(base)?;
    let points = grid.resolve(yc)?;
    if kind == ScanKind::Spectrum {
        return spectrum_table(base, &points, yc);
    }
    let rows: Vec<Vec<Cell>> = points.par_iter().map(|g| point_row(kind, base, g, yc)).collect();
    let mut t = Table::new(kind.columns());
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

pub const FIT_COLUMNS: [&str; 10] =
    ["side", "observable", "slope", "intercept", "r_squared", "window_min", "window_max", "n_points", "accepted", "status"];

/// Exponent fits of `delta_N` and `n_photon` on the requested sides.
pub fn exponent_table(base: &ModelParams, sides: Sides, window: (f64, f64), count: usize) -> Result<Table> {
    base.validate()?;
    let mut t = Table::new(FIT_COLUMNS.to_vec());
    for &side in sides.list() {
        let curve = critical_curve(base, side, window, count)?;
        for obs in Observable::ALL {
            let pts: Vec<(f64, f64)> = curve.iter().filter_map(|(x, r)| r.as_ref().ok().map(|o| (*x, obs.of(o)))).collect();
            let fit = exponent_fit(&pts, window, side);
            let mut row = vec![Cell::text(side.as_str()), Cell::text(obs.as_str())];
            match &fit {
                Ok(f) => row.extend([
                    f.slope.into(),
                    f.intercept.into(),
                    f.r_squared.into(),
                    window.0.into(),
                    window.1.into(),
                    f.n_points.into(),
                    Cell::text(if f.poor_fit { "false" } else { "true" }),
                ]),
                Err(_) => {
                    row.extend(nan_row(3));
                    row.extend([window.0.into(), window.1.into(), pts.len().into(), Cell::text("false")]);
                }
            }
            row.push(status_of(&fit).into());
            t.push(row);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference(kappa: f64) -> ModelParams {
        ModelParams::new(-2.0, kappa, 0.0, 0.0).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let w = default_window();
        let curve: Vec<(f64, f64)> = log_spaced(w.0, w.1, 40).into_iter().map(|x| (x, 3.0 / x)).collect();
        let f = exponent_fit(&curve, w, Side::Below).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-6);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-6);
        assert!(!f.poor_fit);
        assert_eq!(f.n_points, 40);
    }

    #[test]
    fn fit_rejects_bad_curves() {
        let w = (0.1, 1.0);
        let xs = log_spaced(0.1, 1.0, 10);
        let neg: Vec<_> = xs.iter().map(|&x| (x, -x)).collect();
        assert!(matches!(exponent_fit(&neg, w, Side::Above), Err(Error::InvalidCurve(_))));
        let few: Vec<_> = xs.iter().take(5).map(|&x| (x, x)).collect();
        assert!(matches!(exponent_fit(&few, w, Side::Above), Err(Error::InvalidCurve(_))));
    }

    #[test]
    fn noisy_curve_is_flagged() {
        let xs = log_spaced(0.01, 1.0, 20);
        let curve: Vec<_> = xs.iter().enumerate().map(|(k, &x)| (x, if k % 2 == 0 { 1.0 } else { 5.0 })).collect();
        assert!(exponent_fit(&curve, (0.01, 1.0), Side::Below).unwrap().poor_fit);
    }

    #[test]
    fn endpoint_tokens() {
        let e: Endpoint = "2yc".parse().unwrap();
        assert_eq!(e.resolve(2.0), 4.0);
        assert_eq!("yc".parse::<Endpoint>().unwrap().resolve(3.0), 3.0);
        assert_eq!("0.9*yc".parse::<Endpoint>().unwrap().resolve(2.0), 1.8);
        assert_eq!("1.25".parse::<Endpoint>().unwrap().resolve(9.0), 1.25);
        assert!("abc".parse::<Endpoint>().is_err());
    }

    #[test]
    fn linear_grid_syntax() {
        let g: GridSpec = "0:2yc:200".parse().unwrap();
        let pts = g.resolve(2.0).unwrap();
        assert_eq!(pts.len(), 200);
        assert_eq!(pts[0].y, 0.0);
        assert_eq!(pts[199].y, 4.0);
        assert!("0:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn exponent_grid_innermost_point() {
        let pts = GridSpec::exponent(Sides::Both).resolve(2.0).unwrap();
        assert_eq!(pts.len(), 2 * POINTS_PER_SIDE);
        let inner = pts.iter().map(|g| g.deviation.unwrap().1).fold(f64::INFINITY, f64::min);
        assert!((inner - (-14.0f64).exp()).abs() < 1e-20);
        assert!(pts.windows(2).all(|w| w[0].y < w[1].y));
    }

    #[test]
    fn meanfield_rows_normal_below_threshold() {
        let t = figure_scan(ScanKind::MeanField, &reference(2.0), &"0:2yc:200".parse().unwrap()).unwrap();
        let ratio = t.floats("y_over_yc");
        let b = t.floats("beta0_sq");
        for (r, b) in ratio.iter().zip(&b) {
            if *r <= 1.0 {
                assert_eq!(*b, 0.0);
            } else {
                assert!(*b > 0.0);
            }
        }
        assert!(t.texts("status").iter().all(|s| s == "ok"));
    }

    #[test]
    fn meanfield_columns_coincide_open_and_closed() {
        let grid: GridSpec = "0:2yc:200".parse().unwrap();
        let a = figure_scan(ScanKind::MeanAndFluct, &reference(0.0), &grid).unwrap();
        let b = figure_scan(ScanKind::MeanAndFluct, &reference(2.0), &grid).unwrap();
        for col in ["y_over_yc", "beta0_sq"] {
            for (x, y) in a.floats(col).iter().zip(b.floats(col)) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn failed_points_keep_their_row() {
        let grid = GridSpec::Points(vec!["0".parse().unwrap(), "yc".parse().unwrap()]);
        let t = figure_scan(ScanKind::MeanAndFluct, &reference(2.0), &grid).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.texts("status")[0], "ok");
        assert!(["divergent", "unstable"].contains(&t.texts("status")[1].as_str()));
    }

    #[test]
    fn spectrum_scan_reports_real_interval() {
        let t = figure_scan(ScanKind::Spectrum, &reference(2.0), &"0:1.2yc:121".parse().unwrap()).unwrap();
        let points = t.texts("point");
        assert!(points.iter().any(|p| p == "lower_edge"));
        assert!(points.iter().any(|p| p == "upper_edge"));
        let status = t.texts("status");
        for (p, st) in points.iter().zip(&status) {
            if p.ends_with("_edge") {
                assert_eq!(st, "defective");
            }
        }
        let ys = t.floats("y");
        assert!(ys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn open_system_exponent_below() {
        let f = critical_exponent(&reference(2.0), Side::Below, Observable::DeltaN, default_window(), POINTS_PER_SIDE).unwrap();
        assert!((f.slope + 1.0).abs() < 0.02, "{f:?}");
    }

    #[test]
    fn closed_system_exponent_below() {
        let f = critical_exponent(&reference(0.0), Side::Below, Observable::DeltaN, default_window(), POINTS_PER_SIDE).unwrap();
        assert!((f.slope + 0.5).abs() < 0.02, "{f:?}");
    }

    proptest! {
        #[test]
        fn power_laws_recovered(a in 0.1f64..10.0, p in -2.0f64..2.0) {
            let w = default_window();
            let curve: Vec<_> = log_spaced(w.0, w.1, 40).into_iter().map(|x| (x, a * x.powf(p))).collect();
            let f = exponent_fit(&curve, w, Side::Above).unwrap();
            prop_assert!((f.slope - p).abs() < 1e-6);
        }

        #[test]
        fn rescaling_only_shifts_intercept(c in 0.01f64..100.0) {
            let w = (0.001, 0.1);
            let xs = log_spaced(w.0, w.1, 16);
            let curve: Vec<_> = xs.iter().map(|&x| (x, x.powf(-0.7) * (1.0 + x))).collect();
            let scaled: Vec<_> = curve.iter().map(|&(x, v)| (x, c * v)).collect();
            let f = exponent_fit(&curve, w, Side::Below).unwrap();
            let g = exponent_fit(&scaled, w, Side::Below).unwrap();
            prop_assert!((f.slope - g.slope).abs() < 1e-10);
            prop_assert!((g.intercept - f.intercept - c.ln()).abs() < 1e-10);
        }
    }
}
