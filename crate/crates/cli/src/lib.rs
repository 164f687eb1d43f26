//! Command-line driver: loads a run configuration, executes one subcommand and
//! writes header-stamped JSON, CSV and SVG artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod inputs;
pub mod output;

use clap::{Args, Parser, Subcommand};
use config::{CommandName, RunConfig};
use error::CliError;
use output::{ArtifactWriter, Header, TOOL, VERSION};
use std::ffi::OsString;
use std::path::PathBuf;

/// Output directory when neither the config nor --out names one.
pub const DEFAULT_OUT: &str = "cone-ends-out";

#[derive(Debug, Parser)]
#[command(name = "cone-ends", version, about = "Hyperbolic ends, constant curvature foliations and grafting holonomy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Condition (★) and tabulate the equidistant family.
    BuildEnd(Flags),
    /// Solve a grid of constant curvature leaves.
    Foliate(Flags),
    /// Solve one leaf and map it to the dual side.
    Dualize(Flags),
    /// Graft a representation along a measured multicurve.
    Graft(Flags),
    /// Schwarzian derivative, cocycle and cone expansion of a germ.
    Schwarzian(Flags),
    /// Check a normalized metric pair and the surfaces it defines.
    Verify(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Headline tolerance of the subcommand.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Samples per direction on the built-in surfaces.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Add dual-side columns to foliate.
    #[arg(long)]
    pub dualize: bool,
    /// Built-in input used when the config names no input file.
    #[arg(long)]
    pub fixture: Option<String>,
}

impl Command {
    pub fn parts(&self) -> (CommandName, &Flags) {
        match self {
            Command::BuildEnd(f) => (CommandName::BuildEnd, f),
            Command::Foliate(f) => (CommandName::Foliate, f),
            Command::Dualize(f) => (CommandName::Dualize, f),
            Command::Graft(f) => (CommandName::Graft, f),
            Command::Schwarzian(f) => (CommandName::Schwarzian, f),
            Command::Verify(f) => (CommandName::Verify, f),
        }
    }
}

/// Merges the config file with the flags; flags win.
pub fn resolve_config(name: CommandName, flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.command = Some(name);
    if let Some(out) = &flags.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(n) = flags.resolution {
        cfg.resolution.n = Some(n);
    }
    if flags.dualize {
        cfg.dualize = true;
    }
    if let Some(f) = &flags.fixture {
        cfg.inputs.fixture = Some(f.clone());
    }
    if let Some(t) = flags.tol {
        let tol = &mut cfg.tolerances;
        match name {
            CommandName::BuildEnd => tol.core.closed_form = t,
            CommandName::Foliate | CommandName::Dualize => tol.core.newton = t,
            CommandName::Graft => tol.holonomy = t,
            CommandName::Schwarzian => tol.schwarzian = t,
            CommandName::Verify => tol.core.pointwise = t,
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand and returns the paths written.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let name = cfg.command.ok_or_else(|| CliError::validation("config/command", "no command given"))?;
    let header =
        Header { tool: TOOL, version: VERSION, command: name.as_str(), config_hash: cfg.hash(), seed: cfg.seed };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut out = ArtifactWriter::new(&dir, header)?;
    let result = match name {
        CommandName::BuildEnd => commands::build_end::run(cfg, &mut out),
        CommandName::Foliate => commands::foliate::run(cfg, &mut out),
        CommandName::Dualize => commands::dualize::run(cfg, &mut out),
        CommandName::Graft => commands::graft::run(cfg, &mut out),
        CommandName::Schwarzian => commands::schwarzian::run(cfg, &mut out),
        CommandName::Verify => commands::verify::run(cfg, &mut out),
    };
    result.map(|()| out.written().to_vec())
}

fn report_written(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}

/// Parses arguments, runs and returns the process exit code.
pub fn run_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, flags) = cli.command.parts();
    match resolve_config(name, flags).and_then(|cfg| execute(&cfg)) {
        Ok(paths) => {
            report_written(&paths);
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
