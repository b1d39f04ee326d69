//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 numerical failure,
//! 4 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{default_window, exponent_table, figure_scan, Endpoint, GridSpec, ScanKind, Sides, POINTS_PER_SIDE};
use crate::error::{Error, Result};
use crate::model::{critical_pump, ModelParams};
use crate::table::{Cell, Format, Table};
use crate::verify::{verify_point, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "open-dicke", version, about = "Mean field, fluctuations, entanglement and critical exponents of the open two-mode Dicke model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean-field steady state along a pump grid.
    ///
    /// Columns: y, y_over_yc, phase, alpha0_re, alpha0_im, alpha0_sq, beta0_sq, mu, status.
    Meanfield(Opts),
    /// Tracked eigenvalues of the stability matrix plus refined edges of
    /// the intervals on which the atom-like pair is real.
    ///
    /// Columns: point, y, y_over_yc, minus0_re, minus0_im, minus1_re, minus1_im,
    /// plus0_re, plus0_im, plus1_re, plus1_im, minus_real, condition, tracking, status.
    Spectrum(Opts),
    /// Steady-state (kappa > 0) or ground-state (kappa = 0) fluctuations.
    ///
    /// Columns: y, y_over_yc, alpha0_re, alpha0_im, beta0_sq, delta_N, n_photon, status.
    Correlations(Opts),
    /// Critical exponents of delta_N and n_photon from log-log fits.
    ///
    /// Columns: side, observable, slope, intercept, r_squared, window_min, window_max,
    /// n_points, accepted, status. With --points: side, deviation, y, y_over_yc,
    /// delta_N, n_photon, status.
    Exponent(ExponentOpts),
    /// Logarithmic negativity between cavity and atomic fluctuations.
    ///
    /// Columns: y, y_over_yc, E_N, nu_minus, delta_N, n_photon, status.
    Entanglement(Opts),
    /// Oracle-equivalence and invariant checks at one pump value.
    Verify(Opts),
}

#[derive(Debug, Clone, Args)]
struct Opts {
    /// Cavity detuning (must be negative).
    #[arg(long, allow_negative_numbers = true)]
    delta_c: Option<String>,
    /// Cavity loss rate; 0 selects the closed-system ground state.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<String>,
    /// Dispersive atom-cavity shift.
    #[arg(long, allow_negative_numbers = true)]
    u: Option<String>,
    /// Single pump value, e.g. 1.3 or 0.9yc.
    #[arg(long, allow_negative_numbers = true)]
    y: Option<String>,
    /// Pump grid start:stop:count, e.g. 0:2yc:200.
    #[arg(long)]
    y_grid: Option<String>,
    /// Log-spaced grid around the threshold (only `yc` is supported).
    #[arg(long)]
    log_center: Option<String>,
    /// below, above or both (log-centered grids).
    #[arg(long)]
    side: Option<String>,
    /// Smallest |1 - y/y_c|; accepts `e^-14`.
    #[arg(long)]
    window_min: Option<String>,
    /// Largest |1 - y/y_c|; accepts `e^-5`.
    #[arg(long)]
    window_max: Option<String>,
    /// Points per side of a log-centered grid.
    #[arg(long)]
    count: Option<String>,
    /// Output file (standard output if omitted).
    #[arg(long)]
    output: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for per-point computation.
    #[arg(long)]
    threads: Option<String>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct ExponentOpts {
    #[command(flatten)]
    opts: Opts,
    /// Emit the raw curve instead of the fits.
    #[arg(long)]
    points: bool,
}

const KEYS: [&str; 13] = [
    "delta-c", "kappa", "u", "y", "y-grid", "log-center", "side", "window-min", "window-max", "count", "output",
    "format", "threads",
];

fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::InvalidParams(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Flags merged with the config file.
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn new(o: &Opts) -> Result<Self> {
        let mut values = match &o.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("delta-c", &o.delta_c),
            ("kappa", &o.kappa),
            ("u", &o.u),
            ("y", &o.y),
            ("y-grid", &o.y_grid),
            ("log-center", &o.log_center),
            ("side", &o.side),
            ("window-min", &o.window_min),
            ("window-max", &o.window_max),
            ("count", &o.count),
            ("output", &o.output),
            ("format", &o.format),
            ("threads", &o.threads),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::InvalidParams(format!("--{key}: cannot parse {v:?}"))))
            .transpose()
    }

    fn float(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse::<f64>(key)?.unwrap_or(default))
    }

    fn window_value(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_window_value(v).ok_or_else(|| Error::InvalidParams(format!("--{key}: cannot parse {v:?}"))),
        }
    }

    fn base_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.float("delta-c", -2.0)?, self.float("kappa", 2.0)?, self.float("u", 0.0)?, 0.0)
    }

    fn format(&self) -> Result<Format> {
        match self.get("format").unwrap_or("csv") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParams(format!("--format must be csv or json, got {other:?}"))),
        }
    }

    fn sides(&self) -> Result<Sides> {
        self.get("side").unwrap_or("both").parse()
    }

    fn window(&self) -> Result<(f64, f64)> {
        let (lo, hi) = default_window();
        Ok((self.window_value("window-min", lo)?, self.window_value("window-max", hi)?))
    }

    fn count(&self) -> Result<usize> {
        Ok(self.parse::<usize>("count")?.unwrap_or(POINTS_PER_SIDE))
    }

    fn grid(&self, default: &str) -> Result<GridSpec> {
        if let Some(center) = self.get("log-center") {
            if center != "yc" {
                return Err(Error::InvalidParams(format!("--log-center only accepts yc, got {center:?}")));
            }
            if self.get("y").is_some() || self.get("y-grid").is_some() {
                return Err(Error::InvalidParams("--log-center excludes --y and --y-grid".into()));
            }
            return Ok(GridSpec::LogCentered { sides: self.sides()?, window: self.window()?, count: self.count()? });
        }
        match (self.get("y"), self.get("y-grid")) {
            (Some(_), Some(_)) => Err(Error::InvalidParams("--y and --y-grid are mutually exclusive".into())),
            (Some(y), None) => Ok(GridSpec::single(y.parse()?)),
            (None, Some(g)) => g.parse(),
            (None, None) => default.parse(),
        }
    }
}

/// Plain number or `e^x`.
fn parse_window_value(s: &str) -> Option<f64> {
    let t = s.trim();
    match t.strip_prefix("e^") {
        Some(x) => x.trim_matches(|c| c == '(' || c == ')').parse::<f64>().ok().map(f64::exp),
        None => t.parse::<f64>().ok(),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) | Error::NoThreshold { .. } | Error::InvalidGrid(_) => EXIT_INVALID,
        _ => EXIT_NUMERICAL,
    }
}

fn emit(settings: &Settings, text: &str) -> Result<()> {
    match settings.get("output") {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::InvalidParams(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Error::NumericalFailure(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

/// Exit code for a scan table: numerical failure when no row succeeded.
fn table_code(t: &Table) -> i32 {
    let statuses = t.texts("status");
    if !statuses.is_empty() && statuses.iter().all(|s| s != "ok") {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

fn run_scan(kind: ScanKind, o: &Opts, default_grid: &str) -> Result<i32> {
    let s = Settings::new(o)?;
    let format = s.format()?;
    let base = s.base_params()?;
    let grid = s.grid(default_grid)?;
    let table = with_threads(&s, || figure_scan(kind, &base, &grid))?;
    emit(&s, &table.render(format))?;
    Ok(table_code(&table))
}

fn run_exponent(e: &ExponentOpts) -> Result<i32> {
    let s = Settings::new(&e.opts)?;
    let format = s.format()?;
    let base = s.base_params()?;
    if s.get("y").is_some() || s.get("y-grid").is_some() {
        return Err(Error::InvalidParams("exponent uses a log-centered grid; use --window-min/--window-max".into()));
    }
    if let Some(c) = s.get("log-center") {
        if c != "yc" {
            return Err(Error::InvalidParams(format!("--log-center only accepts yc, got {c:?}")));
        }
    }
    let (sides, window, count) = (s.sides()?, s.window()?, s.count()?);
    if e.points {
        let grid = GridSpec::LogCentered { sides, window, count };
        let t = with_threads(&s, || figure_scan(ScanKind::Exponent, &base, &grid))?;
        emit(&s, &t.render(format))?;
        return Ok(table_code(&t));
    }
    let t = with_threads(&s, || exponent_table(&base, sides, window, count))?;
    emit(&s, &t.render(format))?;
    let all_ok = t.texts("status").iter().all(|st| st == "ok");
    Ok(if all_ok { EXIT_OK } else { EXIT_NUMERICAL })
}

fn run_verify(o: &Opts) -> Result<i32> {
    let s = Settings::new(o)?;
    let base = s.base_params()?;
    if s.get("y-grid").is_some() || s.get("log-center").is_some() {
        return Err(Error::InvalidParams("verify takes a single --y".into()));
    }
    let y: Endpoint = s.get("y").unwrap_or("0.9yc").parse()?;
    let p = base.with_y(y.resolve(critical_pump(&base)?));
    let report = with_threads(&s, || verify_point(&p))?;
    let text = match s.get("format") {
        None => report.to_string(),
        Some(_) => {
            let mut t = Table::new(vec!["check", "outcome", "value", "tolerance", "detail"]);
            for c in &report.checks {
                let outcome = match c.outcome {
                    Outcome::Pass => "pass",
                    Outcome::Fail => "fail",
                    Outcome::Skip => "skip",
                };
                t.push(vec![Cell::text(c.name.clone()), outcome.into(), c.value.into(), c.tolerance.into(), Cell::text(c.detail.clone())]);
            }
            t.render(s.format()?)
        }
    };
    emit(&s, &text)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

fn with_threads<T: Send>(s: &Settings, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match s.parse::<usize>("threads")? {
        None => f(),
        Some(0) => Err(Error::InvalidParams("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Meanfield(o) => run_scan(ScanKind::MeanField, o, "0:2yc:201"),
        Command::Spectrum(o) => run_scan(ScanKind::Spectrum, o, "0:1.5yc:301"),
        Command::Correlations(o) => run_scan(ScanKind::MeanAndFluct, o, "0:2yc:201"),
        Command::Entanglement(o) => run_scan(ScanKind::Entanglement, o, "0:2yc:201"),
        Command::Exponent(e) => run_exponent(e),
        Command::Verify(o) => run_verify(o),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
