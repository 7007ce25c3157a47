//! Command-line front end: parameter sweeps written as CSV or JSON tables.
//!
//! Exit codes: 0 success, 1 a diagnostics check failed, 2 usage error,
//! 3 parameter error, 4 convergence failure.

mod commands;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::model::BoundaryConfig;
use crate::pauli_villars::Constraint;
use crate::spectral::DEFAULT_ABEL_EPS;

pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARAMETER: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "vacuum1d",
    version,
    about = "Vacuum energy density, pressure and spectral functions of a scalar field on an interval"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Field mass m >= 0
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,

    /// Interval length L > 0
    #[arg(long, global = true, default_value_t = 1.0)]
    pub length: f64,

    /// Cutoff parameter t (command-specific default)
    #[arg(long = "cutoff-t", global = true)]
    pub cutoff_t: Option<f64>,

    /// Curvature coupling beta = xi - 1/4
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,

    /// Boundary conditions: dd, nn, dn or nd (left end first)
    #[arg(long, global = true, default_value = "dd", value_parser = parse_bc)]
    pub bc: BoundaryConfig,

    /// Number of sweep points
    #[arg(long, global = true, default_value_t = 51)]
    pub grid: usize,

    /// Upper end of frequency sweeps
    #[arg(long = "omega-max", global = true, default_value_t = 10.0)]
    pub omega_max: f64,

    #[arg(long = "output-format", global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,

    /// Output file (stdout when omitted)
    #[arg(long = "output", short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Log more (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Energy density E(t, x) by component, with the eigenmode-sum oracle
    Density,
    /// Eigenvalue density rho(omega), or local density sigma(omega, x) with --x
    Spectrum {
        #[arg(long)]
        x: Option<f64>,
        /// Abel damping of the periodic series
        #[arg(long, default_value_t = DEFAULT_ABEL_EPS)]
        eps: f64,
    },
    /// Counting function N(omega) by component, with the exact count
    Counting,
    /// Pressure by component (Dirichlet at both ends)
    Pressure {
        #[arg(long, value_enum, default_value_t = Sweep::X)]
        sweep: Sweep,
        /// Position for --sweep t (default L/2)
        #[arg(long)]
        x: Option<f64>,
        /// Smallest t for --sweep t
        #[arg(long = "t-min", default_value_t = 1e-3)]
        t_min: f64,
    },
    /// Solve for Pauli–Villars regulator coefficients
    PvSolve(PvArgs),
    /// Regularized energy and pressure over a logarithmic t sweep
    PvStress {
        #[command(flatten)]
        pv: PvArgs,
        /// Position (default L/2)
        #[arg(long)]
        x: Option<f64>,
        #[arg(long = "t-min", default_value_t = 1e-4)]
        t_min: f64,
    },
    /// Trace, virtual-work and decomposition checks with measured residuals
    Diagnostics,
}

#[derive(Debug, Clone, Args)]
pub struct PvArgs {
    #[arg(long = "physical-mass", default_value_t = 0.0)]
    pub physical_mass: f64,

    /// Comma-separated regulator masses
    #[arg(long, value_delimiter = ',', required = true)]
    pub regulators: Vec<f64>,

    /// Comma-separated subset of sum, m2, lnm, m2_lnm
    #[arg(long, value_delimiter = ',', default_value = "sum,m2", value_parser = parse_constraint)]
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Density,
    Spectrum,
    Counting,
    Pressure,
    PvSolve,
    PvStress,
    Diagnostics,
}

fn parse_bc(s: &str) -> Result<BoundaryConfig, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_constraint(s: &str) -> Result<Constraint, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Fully resolved parameters of one run; echoed as `meta` in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub mass: f64,
    pub length: f64,
    pub cutoff_t: f64,
    pub beta: f64,
    #[serde(serialize_with = "bc_label")]
    pub bc: BoundaryConfig,
    pub grid: usize,
    pub omega_max: f64,
    pub output_format: OutputFormat,
    pub output_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regulators: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<Constraint>>,
}

fn bc_label<S: serde::Serializer>(bc: &BoundaryConfig, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(bc.label())
}

#[derive(Debug)]
pub enum CliError {
    Parameter(String),
    Numeric(Error),
    Io(io::Error),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(e) if e.is_convergence() => EXIT_CONVERGENCE,
            CliError::ChecksFailed(_) => EXIT_CHECK_FAILED,
            _ => EXIT_PARAMETER,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parameter(msg) => write!(f, "parameter error: {msg}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
            CliError::ChecksFailed(n) => write!(f, "{n} diagnostic check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn param(msg: impl Into<String>) -> CliError {
    CliError::Parameter(msg.into())
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let c = &cli.common;
        let (kind, default_t) = match &cli.command {
            Command::Density => (CommandKind::Density, 0.1),
            Command::Spectrum { .. } => (CommandKind::Spectrum, 0.0),
            Command::Counting => (CommandKind::Counting, 0.0),
            Command::Pressure { .. } => (CommandKind::Pressure, 0.1),
            Command::PvSolve(_) => (CommandKind::PvSolve, 0.0),
            Command::PvStress { .. } => (CommandKind::PvStress, 1e-2),
            Command::Diagnostics => (CommandKind::Diagnostics, 1e-2),
        };
        let mut cfg = RunConfig {
            command: kind,
            mass: c.mass,
            length: c.length,
            cutoff_t: c.cutoff_t.unwrap_or(default_t),
            beta: c.beta,
            bc: c.bc,
            grid: c.grid,
            omega_max: c.omega_max,
            output_format: c.output_format,
            output_path: c.output.as_ref().map(|p| p.display().to_string()),
            x: None,
            eps: None,
            sweep: None,
            t_min: None,
            physical_mass: None,
            regulators: None,
            constraints: None,
        };
        match &cli.command {
            Command::Spectrum { x, eps } => {
                cfg.x = *x;
                cfg.eps = Some(*eps);
            }
            Command::Pressure { sweep, x, t_min } => {
                cfg.sweep = Some(*sweep);
                cfg.x = *x;
                cfg.t_min = Some(*t_min);
            }
            Command::PvSolve(pv) => cfg.set_pv(pv),
            Command::PvStress { pv, x, t_min } => {
                cfg.set_pv(pv);
                cfg.x = *x;
                cfg.t_min = Some(*t_min);
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_pv(&mut self, pv: &PvArgs) {
        self.physical_mass = Some(pv.physical_mass);
        self.regulators = Some(pv.regulators.clone());
        self.constraints = Some(pv.constraints.clone());
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(param(format!("--mass must be finite and >= 0, got {}", self.mass)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(param(format!("--length must be finite and > 0, got {}", self.length)));
        }
        if !(self.cutoff_t >= 0.0 && self.cutoff_t.is_finite()) {
            return Err(param(format!(
                "--cutoff-t must be finite and >= 0, got {}",
                self.cutoff_t
            )));
        }
        if !self.beta.is_finite() {
            return Err(param("--beta must be finite"));
        }
        if self.grid < 2 {
            return Err(param(format!("--grid must be at least 2, got {}", self.grid)));
        }
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return Err(param(format!(
                "--omega-max must be finite and > 0, got {}",
                self.omega_max
            )));
        }
        if let Some(x) = self.x {
            if !(0.0..=self.length).contains(&x) {
                return Err(param(format!("--x = {x} outside [0, {}]", self.length)));
            }
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(param(format!("--eps must be finite and > 0, got {eps}")));
            }
        }
        if let Some(t_min) = self.t_min {
            if !(t_min > 0.0 && t_min < self.cutoff_t) {
                return Err(param(format!(
                    "--t-min must satisfy 0 < t-min < cutoff-t, got {t_min} and {}",
                    self.cutoff_t
                )));
            }
        }
        Ok(())
    }
}

/// Evaluates the configured command.
pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.command {
        CommandKind::Density => commands::density(cfg),
        CommandKind::Spectrum => commands::spectrum(cfg),
        CommandKind::Counting => commands::counting(cfg),
        CommandKind::Pressure => commands::pressure(cfg),
        CommandKind::PvSolve => commands::pv_solve(cfg),
        CommandKind::PvStress => commands::pv_stress(cfg),
        CommandKind::Diagnostics => commands::diagnostics(cfg),
    }
}

fn write_output(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(path) => {
            let file = File::create(path).map_err(|e| param(format!("cannot write {path}: {e}")))?;
            let mut out = BufWriter::new(file);
            table.write(cfg, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            table.write(cfg, &mut out)?;
        }
    }
    Ok(())
}

/// Rows whose `pass` column is false.
pub fn failed_checks(table: &Table) -> usize {
    let Some(col) = table.columns.iter().position(|&c| c == "pass") else {
        return 0;
    };
    table.rows.iter().filter(|row| row[col] == Cell::Bool(false)).count()
}

/// Parses `args`, runs, writes the table, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();

    let result = RunConfig::from_cli(&cli).and_then(|cfg| {
        let table = run(&cfg)?;
        write_output(&cfg, &table)?;
        match failed_checks(&table) {
            0 => Ok(()),
            n => Err(CliError::ChecksFailed(n)),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("vacuum1d: {e}");
            e.exit_code()
        }
    }
}
