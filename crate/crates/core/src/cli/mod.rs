//! Command-line driver behind the `qrel` binary.
//!
//! Exit codes: 0 success, 1 failed check, 2 configuration error,
//! 3 insufficient data.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use config::{Range, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INSUFFICIENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qrel",
    version,
    about = "Reliability, sensitivity and error of a spin-precession field sensor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV destination (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Reading used for the sensitivity: beta_tilde or B_measured.
    #[arg(long, global = true)]
    reading: Option<String>,
    /// Scaling regime: first_order or second_order.
    #[arg(long, global = true)]
    regime: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Single pipeline evaluation.
    RunPoint,
    /// Reliability over a (k0, b) grid.
    SweepGrid,
    /// Reliability and error against the field.
    SweepField,
    /// Linear fit of 1 - R against S |dB| near the ideal regime.
    FitRelation,
    /// Log-log fit of |dB| against 1 - R.
    FitScaling,
    /// Consistency of a history family.
    CheckConsistency,
    /// Closed forms against the grid oracle.
    OracleCompare,
}

/// Defaults per subcommand, applied before the user's configuration.
fn defaults(cmd: Command) -> &'static [(&'static str, &'static str)] {
    match cmd {
        Command::RunPoint | Command::OracleCompare => &[],
        Command::SweepGrid => &[("k0_range", "2, 15, 50"), ("b_range", "5, 50, 50")],
        Command::SweepField => &[("Bx_range", "0.05, 3, 60")],
        Command::FitRelation => &[("k0_range", "10, 15, 41"), ("b_range", "30, 50, 41")],
        Command::FitScaling => &[("k0_range", "13, 15, 21"), ("b_range", "30, 50, 21")],
        Command::CheckConsistency => &[("k0", "12"), ("b", "36")],
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    for (k, v) in defaults(cli.command) {
        cfg.set(k, v, false)?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for kv in &cli.set {
        cfg.apply_override(kv)?;
    }
    if let Some(r) = &cli.reading {
        cfg.set("reading", r, true)?;
    }
    if let Some(r) = &cli.regime {
        cfg.set("regime", r, true)?;
    }
    if let Some(p) = &cli.out {
        cfg.out = Some(p.clone());
    }
    if cli.command == Command::FitScaling && !cfg.is_explicit("Bx") {
        cfg.params.bx = commands::regime_field(cfg.regime);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParam { .. }
        | Error::Domain(_)
        | Error::DimensionCap { .. } => EXIT_CONFIG,
        Error::InsufficientData { .. } => EXIT_INSUFFICIENT,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// summary to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let result = load(&cli).and_then(|cfg| commands::dispatch(cli.command, &cfg, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

impl Range {
    fn describe(&self) -> String {
        format!("[{}, {}] x {}", self.lo, self.hi, self.n)
    }
}
