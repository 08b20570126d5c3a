mod commands;
mod config;
mod evolution;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_pair, Overrides, RunConfig, OUT_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "coherent-top",
    version,
    about = "Verification suites for oscillator coherent states as spinning tops"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (the COHERENT_TOP_OUT environment variable takes precedence).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    periods: Option<f64>,
    /// +1 or -1
    #[arg(long, global = true, allow_negative_numbers = true)]
    spin: Option<i32>,
    #[arg(long, global = true, value_name = "X,Y", value_parser = parse_pair, allow_hyphen_values = true)]
    xi0: Option<[f64; 2]>,
    #[arg(long, global = true, value_name = "X,Y", value_parser = parse_pair, allow_hyphen_values = true)]
    v0: Option<[f64; 2]>,
    /// Tracer seeds as offsets from xi0, separated by ';'.
    #[arg(long, global = true, value_name = "X,Y;...", value_parser = parse_pair, value_delimiter = ';', allow_hyphen_values = true)]
    seed_points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every suite and write verify_report.json.
    Verify,
    /// Write analytic and numeric field snapshots and the error series.
    Evolve,
    /// Write tracer paths and a rotation summary.
    Trajectories,
    /// Write the hydrogen ground-state report.
    Hydrogen,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let overrides = Overrides {
        out: cli.out,
        grid_n: cli.grid_n,
        dt: cli.dt,
        periods: cli.periods,
        spin: cli.spin,
        xi0: cli.xi0,
        v0: cli.v0,
        seed_points: cli.seed_points,
    };
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let cfg = RunConfig::load(cli.config.as_deref(), overrides, env_out)?;
    let report = match cli.command {
        Command::Verify => commands::cmd_verify(&cfg)?,
        Command::Evolve => commands::cmd_evolve(&cfg)?,
        Command::Trajectories => commands::cmd_trajectories(&cfg)?,
        Command::Hydrogen => commands::cmd_hydrogen(&cfg)?.report,
    };
    Ok(commands::summarize(&report, &cfg.out))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
