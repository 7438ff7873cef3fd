use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tlfdeco::commands::{self, RunFlags, SweepSpec};
use tlfdeco::config::RunConfig;
use tlfdeco::CliError;

/// Qubit decoherence by a bath-dressed two-level fluctuator.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Config file of `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config value; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    /// Omit the timestamp comment from file headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fluctuator table and qubit spectrum.
    Spectrum,
    /// P(t) from the full and rotating-wave propagators.
    Dynamics,
    /// Pole analysis and regime classification.
    Poles,
    /// Parameter sweep with a monotonicity verdict on the half-width.
    Sweep {
        /// VAR=START:STOP:STEPS with VAR one of T, alpha_pz, g0, detuning;
        /// defaults to the config's sweep section.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Exact diagonalization with discrete bath modes against the pipeline.
    Oracle,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let cfg = base.with_overrides(&cli.set)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let flags = RunFlags {
        timestamp: !cli.no_timestamp,
    };
    let out = &cli.out;
    match &cli.command {
        Command::Spectrum => commands::spectrum(&cfg, out, flags),
        Command::Dynamics => commands::dynamics(&cfg, out, flags),
        Command::Poles => commands::poles(&cfg, out, flags),
        Command::Sweep { sweep } => {
            let spec = match sweep {
                Some(s) => SweepSpec::parse(s)?,
                None => SweepSpec::from_config(&cfg)?,
            };
            commands::sweep(&cfg, &spec, out, flags)
        }
        Command::Oracle => commands::oracle(&cfg, out, flags),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
