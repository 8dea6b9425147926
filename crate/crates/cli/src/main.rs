//! `kgbench` — spectral Klein–Gordon solver benchmark driver.
//!
//! Exit codes: 0 success, 1 invalid configuration or I/O failure,
//! 2 numerical failure (blow-up mid-run or unconverged reference).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kgbench_cli::config::{self, Settings};
use kgbench_cli::commands;
use kgbench_core::error::Error;
use kgbench_core::experiments::Theta;

#[derive(Parser)]
#[command(
    name = "kgbench",
    about = "Sine-spectral semilinear Klein-Gordon solver and time-integrator benchmark",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate once with one scheme and step size; report final norms.
    Run(CommonArgs),
    /// Convergence sweep over schemes and step sizes; CSV/JSON outputs.
    Convergence(CommonArgs),
    /// Full scheme catalogue on smooth and rough data (error vs tau and
    /// precision vs work).
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Time integrator (run) — see --help for the list.
    #[arg(long)]
    scheme: Option<String>,

    /// Nonlinearity: sine, zero, or constant:<c>.
    #[arg(long)]
    f: Option<String>,

    /// Initial-data regularity: a number (coefficient decay exponent) or
    /// "smooth".
    #[arg(long)]
    theta: Option<String>,

    /// Seed for the splitmix64-v1 initial-data generator.
    #[arg(long)]
    seed: Option<u64>,

    /// Modes (and interior nodes) per dimension.
    #[arg(long = "N")]
    n_modes: Option<usize>,

    /// Spatial dimension (1, 2 or 3).
    #[arg(long)]
    d: Option<usize>,

    /// Step size (run; also a single-entry sweep list).
    #[arg(long)]
    tau: Option<f64>,

    /// Comma-separated step sizes for sweeps.
    #[arg(long = "tau-list", value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,

    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,

    /// Reference step size (enables error reporting for `run`).
    #[arg(long = "reference-tau")]
    reference_tau: Option<f64>,

    /// Scheme used for the reference solution.
    #[arg(long = "reference-scheme")]
    reference_scheme: Option<String>,

    /// Comma-separated scheme list for sweeps.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,

    /// Output path (run: JSON file; sweeps: basename for .csv/.json).
    #[arg(long)]
    out: Option<String>,

    /// Which files to write: csv, json or both.
    #[arg(long)]
    format: Option<String>,

    /// Worker threads (default: KGBENCH_THREADS or available parallelism).
    #[arg(long)]
    threads: Option<usize>,

    /// Emit two-column plot data files per scheme.
    #[arg(long = "plot-data")]
    plot_data: bool,

    /// Record this many evenly spaced trajectory snapshots (run only).
    #[arg(long)]
    snapshots: Option<usize>,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, Vec<String>> {
        let mut issues = Vec::new();
        let theta = match &self.theta {
            None => None,
            Some(text) => match text.parse::<Theta>() {
                Ok(t) => Some(t),
                Err(e) => {
                    issues.push(e.to_string());
                    None
                }
            },
        };
        let flags = Settings {
            scheme: self.scheme.clone(),
            f: self.f.clone(),
            theta,
            seed: self.seed,
            n_modes: self.n_modes,
            d: self.d,
            tau: self.tau,
            tau_list: self.tau_list.clone(),
            t_final: self.t_final,
            reference_tau: self.reference_tau,
            reference_scheme: self.reference_scheme.clone(),
            schemes: self.schemes.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            threads: self.threads,
            plot_data: self.plot_data.then_some(true),
            snapshots: self.snapshots,
        };
        let merged = match &self.config {
            None => flags,
            Some(path) => match Settings::from_file(path) {
                Ok(file) => flags.over(file),
                Err(e) => {
                    issues.push(e);
                    flags
                }
            },
        };
        if issues.is_empty() {
            Ok(merged)
        } else {
            Err(issues)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), ExitFailure> {
    match cli.command {
        Command::Run(args) => {
            let settings = args.settings().map_err(ExitFailure::Config)?;
            let cfg = config::finalize_run(&settings).map_err(ExitFailure::Config)?;
            config::setup_threads(cfg.threads);
            commands::cmd_run(&cfg).map_err(ExitFailure::from)?;
        }
        Command::Convergence(args) => {
            let settings = args.settings().map_err(ExitFailure::Config)?;
            let cfg = config::finalize_convergence(&settings).map_err(ExitFailure::Config)?;
            config::setup_threads(cfg.threads);
            commands::cmd_convergence(&cfg).map_err(ExitFailure::from)?;
        }
        Command::Compare(args) => {
            let settings = args.settings().map_err(ExitFailure::Config)?;
            let cfg = config::finalize_compare(&settings).map_err(ExitFailure::Config)?;
            config::setup_threads(cfg.threads);
            commands::cmd_compare(&cfg).map_err(ExitFailure::from)?;
        }
    }
    Ok(())
}

enum ExitFailure {
    Config(Vec<String>),
    Numerical(Error),
    Other(Error),
}

impl From<Error> for ExitFailure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::ReferenceNotConverged { .. } => {
                ExitFailure::Numerical(e)
            }
            other => ExitFailure::Other(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(ExitFailure::Config(issues)) => {
            for issue in &issues {
                eprintln!("configuration error: {issue}");
            }
            ExitCode::from(1)
        }
        Err(ExitFailure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(2)
        }
        Err(ExitFailure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
