//! Command-line front end: JSON run configurations, parameter sweeps with
//! CSV/JSON output, and the verification entry point.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{reduced_scalars, scalars_from_phase_shifts, DriveConfig, PhaseShiftTable, ScatteringScalars};
use crate::oracle::suite::{run_suite, ReducedHook, SpectralCase, SuiteOptions, VerificationReport};
use crate::spectrum::{mollow_inel_x, ElasticLine, TotalSpectrum};
use crate::xsection::{cross_sections_reduced, mollow_xsections};

pub const SCHEMA: &str = "qsatom v1";

/// Exit status for a failed check or numerical error.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for an invalid configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qsatom",
    version,
    about = "Two-level atom with direct scattering: cross sections, spectra, verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integral cross sections over an (η², z̃) grid.
    Xsection(RunArgs),
    /// Fluorescence spectra over an (η², z̃, x) grid.
    Spectrum(RunArgs),
    /// Run the oracle and invariant suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output format (overrides the config file).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; stdout when absent (overrides the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Optional configuration whose parameters are added to the suite.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed of the randomized parameter grids.
    #[arg(long, default_value_t = SuiteOptions::default().seed)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Scalars,
    PhaseShifts,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarsBlock {
    pub delta0_plus: f64,
    pub delta0_minus: f64,
    pub norm2_pg_plus: f64,
    pub norm2_pg_minus: f64,
    pub norm2_pdg: f64,
    pub eps_r: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseShiftBlock {
    pub delta_plus: Vec<f64>,
    pub delta_minus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

/// A sweep axis: explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range(Linspace),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::List(v) => v.clone(),
            Axis::Range(r) => match r.num {
                0 => Vec::new(),
                1 => vec![r.start],
                n => (0..n)
                    .map(|i| r.start + (r.stop - r.start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub scalars: Option<ScalarsBlock>,
    #[serde(default)]
    pub phase_shifts: Option<PhaseShiftBlock>,
    pub eta2: Axis,
    pub ztilde: Axis,
    #[serde(default)]
    pub gammatilde: Option<f64>,
    #[serde(default)]
    pub x_grid: Option<Axis>,
    /// Add scattering-free reference columns to spectra.
    #[serde(default)]
    pub mollow_reference: bool,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Validated model inputs of a configuration.
#[derive(Debug, Clone)]
pub struct ModelInputs {
    pub scalars: ScatteringScalars,
    pub table: Option<PhaseShiftTable>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn model(&self) -> Result<ModelInputs, CliError> {
        match (self.mode, &self.scalars, &self.phase_shifts) {
            (Mode::Scalars, Some(s), None) => Ok(ModelInputs {
                scalars: ScatteringScalars::new(
                    s.delta0_plus,
                    s.delta0_minus,
                    s.norm2_pg_plus,
                    s.norm2_pg_minus,
                    s.norm2_pdg,
                    s.eps_r,
                )
                .map_err(config_err)?,
                table: None,
            }),
            (Mode::PhaseShifts, None, Some(p)) => {
                let t = PhaseShiftTable::new(p.delta_plus.clone(), p.delta_minus.clone()).map_err(config_err)?;
                Ok(ModelInputs {
                    scalars: scalars_from_phase_shifts(&t),
                    table: Some(t),
                })
            }
            (Mode::Scalars, _, _) => Err(config_err(
                "mode \"scalars\" needs a `scalars` block and no `phase_shifts` block",
            )),
            (Mode::PhaseShifts, _, _) => Err(config_err(
                "mode \"phase_shifts\" needs a `phase_shifts` block and no `scalars` block",
            )),
        }
    }

    fn axis(name: &str, axis: &Axis) -> Result<Vec<f64>, CliError> {
        let v = axis.values();
        if v.is_empty() {
            return Err(CliError::Config(format!("`{name}` must not be empty")));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("`{name}` contains a non-finite value {bad}")));
        }
        Ok(v)
    }

    pub fn eta2_values(&self) -> Result<Vec<f64>, CliError> {
        let v = Self::axis("eta2", &self.eta2)?;
        if let Some(bad) = v.iter().find(|&&x| x < 0.0) {
            return Err(CliError::Config(format!("`eta2` must be non-negative, got {bad}")));
        }
        Ok(v)
    }

    pub fn ztilde_values(&self) -> Result<Vec<f64>, CliError> {
        Self::axis("ztilde", &self.ztilde)
    }

    pub fn x_values(&self) -> Result<Vec<f64>, CliError> {
        match &self.x_grid {
            Some(a) => Self::axis("x_grid", a),
            None => Err(config_err("spectra need an `x_grid`")),
        }
    }

    /// Instrumental width; spectra require it to be positive.
    pub fn spectral_width(&self) -> Result<f64, CliError> {
        match self.gammatilde {
            Some(g) if g.is_finite() && g > 0.0 => Ok(g),
            Some(g) => Err(CliError::Config(format!(
                "`gammatilde` must be positive for spectra (got {g}); the elastic line is a delta at zero width"
            ))),
            None => Err(config_err("spectra need `gammatilde`")),
        }
    }

    /// The `(η², z̃)` grid in output order.
    pub fn drives(&self, gammatilde: f64) -> Result<Vec<(f64, DriveConfig)>, CliError> {
        let eta2 = self.eta2_values()?;
        let zt = self.ztilde_values()?;
        let mut out = Vec::with_capacity(eta2.len() * zt.len());
        for &e in &eta2 {
            for &z in &zt {
                out.push((e, DriveConfig::from_eta2(e, z, gammatilde).map_err(config_err)?));
            }
        }
        Ok(out)
    }
}

/// Tabular sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub schema: &'static str,
    pub units: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        Table {
            schema: SCHEMA,
            units: "reduced units (alpha2=1)",
            columns,
            rows,
        }
    }

    /// CSV with a versioned comment line, a header row and 17 significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# {}, {}, columns: {}\n",
            self.schema,
            self.units,
            self.columns.join(",")
        );
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn run_xsection_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.model()?;
    let drives = cfg.drives(cfg.gammatilde.unwrap_or(0.0).max(0.0))?;
    let sc = model.scalars;
    let rows = drives
        .par_iter()
        .map(|(eta2, dc)| {
            let c = cross_sections_reduced(&sc, &reduced_scalars(&sc, dc));
            vec![*eta2, dc.ztilde(), c.total, c.elastic, c.inelastic]
        })
        .collect();
    Ok(Table::new(
        vec!["eta2", "ztilde", "sigma_tot", "sigma_el", "sigma_inel"],
        rows,
    ))
}

pub fn run_spectrum_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.model()?;
    let gt = cfg.spectral_width()?;
    let drives = cfg.drives(gt)?;
    let xs = cfg.x_values()?;
    let sc = model.scalars;
    let blocks: Vec<Vec<Vec<f64>>> = drives
        .par_iter()
        .map(|(eta2, dc)| -> Result<Vec<Vec<f64>>, Error> {
            let spec = TotalSpectrum::new(&sc, dc)?;
            let mollow_line = ElasticLine {
                weight: mollow_xsections(dc.ztilde(), dc.eta()).elastic,
                center: 0.0,
            };
            xs.iter()
                .map(|&x| {
                    let inel = spec.inelastic.at(x)?;
                    let el = spec.elastic_at(x);
                    let mut row = vec![*eta2, dc.ztilde(), x, el + inel, inel, el];
                    if cfg.mollow_reference {
                        let m_inel = mollow_inel_x(dc.ztilde(), dc.eta(), gt, x);
                        row.push(mollow_line.lorentzian(gt, x)? + m_inel);
                        row.push(m_inel);
                    }
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<_, _>>()
        .map_err(CliError::Numerical)?;
    let mut columns = vec!["eta2", "ztilde", "x", "Sigma_tot", "Sigma_inel", "Sigma_el_lorentzian"];
    if cfg.mollow_reference {
        columns.extend(["Sigma_tot_mollow", "Sigma_inel_mollow"]);
    }
    Ok(Table::new(columns, blocks.into_iter().flatten().collect()))
}

/// Suite options for an optional configuration: its parameters join the
/// spectral normalization cases and a phase-shift table replaces the
/// built-in finite-beam table.
pub fn suite_options(cfg: Option<&RunConfig>, seed: u64) -> Result<SuiteOptions, CliError> {
    let mut opts = SuiteOptions {
        seed,
        ..SuiteOptions::default()
    };
    if let Some(cfg) = cfg {
        let model = cfg.model()?;
        let gt = cfg.gammatilde.filter(|g| *g > 0.0).unwrap_or(0.6);
        let drives = cfg.drives(gt)?.into_iter().map(|(_, d)| d).collect();
        opts.spectral_cases.push(SpectralCase {
            label: "config".into(),
            scalars: model.scalars,
            drives,
        });
        if let Some(t) = model.table {
            opts.table = Some(t);
        }
    }
    Ok(opts)
}

/// Runs the suite, optionally with a perturbation of the reduced scalars.
pub fn run_verify_with(
    cfg: Option<&RunConfig>,
    seed: u64,
    hook: Option<ReducedHook>,
) -> Result<VerificationReport, CliError> {
    let mut opts = suite_options(cfg, seed)?;
    opts.hook = hook;
    Ok(run_suite(&opts))
}

pub fn run_verify(cfg: Option<&RunConfig>, seed: u64) -> Result<VerificationReport, CliError> {
    run_verify_with(cfg, seed, None)
}

pub fn render_report(report: &VerificationReport, format: Option<Format>) -> String {
    match format {
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Some(Format::Csv) => {
            let mut s = format!("# {SCHEMA}, verification report\ncheck,tolerance,measured,passed\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{},{:.16e},{:.16e},{}\n",
                    c.name, c.tolerance, c.measured, c.passed
                ));
            }
            s
        }
        None => {
            let mut s = String::new();
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!(
                    "{status}  {:<36} measured {:>11.3e}  tol {:.1e}",
                    c.name, c.measured, c.tolerance
                ));
                if let Some(d) = &c.detail {
                    s.push_str(&format!("  ({d})"));
                }
                s.push('\n');
            }
            let failed = report.failures().count();
            s.push_str(&format!(
                "{} checks, {} failed: {}\n",
                report.checks.len(),
                failed,
                if report.passed { "OK" } else { "FAILED" }
            ));
            s
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed downstream pipe (`| head`) is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(config_err("`--threads` must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(config_err),
    }
}

fn run_sweep(args: &RunArgs, sweep: fn(&RunConfig) -> Result<Table, CliError>) -> Result<i32, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let table = with_threads(args.common.threads, || sweep(&cfg))??;
    let format = args.common.format.or(cfg.format).unwrap_or(Format::Csv);
    let out = args.common.out.as_deref().or(cfg.out.as_deref());
    emit(&table.render(format), out)?;
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let cfg = args.config.as_deref().map(RunConfig::load).transpose()?;
    let report = with_threads(args.common.threads, || run_verify(cfg.as_ref(), args.seed))??;
    let out = args
        .common
        .out
        .as_deref()
        .or(cfg.as_ref().and_then(|c| c.out.as_deref()));
    emit(&render_report(&report, args.common.format), out)?;
    if !report.passed {
        for c in report.failures() {
            eprintln!(
                "check failed: {} (measured {:e}, tolerance {:e})",
                c.name, c.measured, c.tolerance
            );
        }
    }
    Ok(report_exit_code(&report))
}

/// Exit status of `verify`: 0 iff every check passed.
pub fn report_exit_code(report: &VerificationReport) -> i32 {
    if report.passed {
        0
    } else {
        EXIT_FAILURE
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Xsection(a) => run_sweep(a, run_xsection_sweep),
        Command::Spectrum(a) => run_sweep(a, run_spectrum_sweep),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qsatom: {e}");
            e.exit_code()
        }
    }
}
