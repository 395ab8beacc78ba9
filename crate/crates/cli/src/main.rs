// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! `mmrabi`: command-line front end for the multiqubit multimode Rabi model.
//!
//! Exit status: 0 on success, 1 on I/O errors, 2 on configuration errors
//! (the offending key path is printed), 3 on numerical failures (a
//! diagnostic JSON is printed and written to `<out>/diagnostic.json`).

mod commands;
mod config;
mod emit;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{Command, Context, Figure};
use config::ExperimentConfig;
use emit::Sink;
use error::{CliError, CliResult, ConfigError};

/// Caps the worker pool used by parallel sweeps.
const THREADS_ENV: &str = "RABI_MM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mmrabi",
    version,
    about = "Multiqubit multimode quantum Rabi model simulator"
)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and JSON summaries.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized checks (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Total photon cutoff (overrides the config and figure defaults).
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// List the truncated basis.
    Basis,
    /// Diagonalize the configured model per parity sector.
    Spectrum,
    /// Spectrum against a common coupling scale.
    Sweep,
    /// Check a closed-form dark state against the configured model.
    DarkVerify,
    /// Search for eigenstates with at most one photon.
    SolveOnePhoton,
    /// Closed-system W generation with the gap monitor.
    Adiabatic,
    /// Open-system W generation.
    Lindblad,
    /// Generation, storage and emission into the lines.
    CatchRelease,
    /// Effective couplings from circuit parameters.
    CircuitMap,
    /// Regenerate a reference figure's data.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

impl Cmd {
    fn name(&self) -> String {
        match self {
            Cmd::Basis => "basis".into(),
            Cmd::Spectrum => "spectrum".into(),
            Cmd::Sweep => "sweep".into(),
            Cmd::DarkVerify => "dark-verify".into(),
            Cmd::SolveOnePhoton => "solve-one-photon".into(),
            Cmd::Adiabatic => "adiabatic".into(),
            Cmd::Lindblad => "lindblad".into(),
            Cmd::CatchRelease => "catch-release".into(),
            Cmd::CircuitMap => "circuit-map".into(),
            Cmd::Reproduce { figure } => format!("reproduce {figure:?}").to_lowercase(),
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        ConfigError::new(
            THREADS_ENV,
            format!("expected a positive integer, got `{raw}`"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::new(THREADS_ENV, e.to_string()))?;
    Ok(())
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = cli.cutoff {
        if let Some(m) = cfg.model.as_mut() {
            m.n_max = c;
        }
        cfg.validate()?;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let cfg = load_config(cli)?;
    let mut ctx = Context {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        cutoff: cli.cutoff,
        cfg,
        sink: Sink::new(&cli.out, cli.quiet)?,
    };
    match &cli.command {
        Cmd::Basis => commands::run(Command::Basis, &mut ctx),
        Cmd::Spectrum => commands::run(Command::Spectrum, &mut ctx),
        Cmd::Sweep => commands::run(Command::Sweep, &mut ctx),
        Cmd::DarkVerify => commands::run(Command::DarkVerify, &mut ctx),
        Cmd::SolveOnePhoton => commands::run(Command::SolveOnePhoton, &mut ctx),
        Cmd::Adiabatic => commands::run(Command::Adiabatic, &mut ctx),
        Cmd::Lindblad => commands::run(Command::Lindblad, &mut ctx),
        Cmd::CatchRelease => commands::run(Command::CatchRelease, &mut ctx),
        Cmd::CircuitMap => commands::run(Command::CircuitMap, &mut ctx),
        Cmd::Reproduce { figure } => commands::run_figure(*figure, &mut ctx),
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    subcommand: String,
    stage: &'a str,
    error: String,
    detail: String,
    seed: Option<u64>,
    cutoff: Option<usize>,
}

fn report(cli: &Cli, err: &CliError) {
    match err {
        CliError::Numerical { stage, source } => {
            let diag = Diagnostic {
                subcommand: cli.command.name(),
                stage,
                error: source.to_string(),
                detail: format!("{source:?}"),
                seed: cli.seed,
                cutoff: cli.cutoff,
            };
            match emit::to_json_string(&diag) {
                Ok(text) => {
                    eprint!("{text}");
                    if std::fs::create_dir_all(&cli.out).is_ok() {
                        let _ = std::fs::write(cli.out.join("diagnostic.json"), text);
                    }
                }
                Err(_) => eprintln!("error: {err}"),
            }
        }
        _ => eprintln!("error: {err}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&cli, &e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
