use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uav_backhaul::commands::{run_command, Command, RunError, OUT_DIR_ENV};
use uav_backhaul::config::{load_config, ScenarioConfig};

/// Simulate and optimise a fixed-wing UAV mmWave backhaul relay.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed, overriding the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count, overriding the scenario.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output directory [default: $UAV_BACKHAUL_OUT_DIR or ./results].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Restrict misalignment draws to [0, pi/2).
    #[arg(long, global = true)]
    strict_truncation: bool,
    /// Search every UAV element-count pair.
    #[arg(long, global = true)]
    no_prune: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Sea-level oxygen and water-vapour attenuation over frequency.
    AtmosTable,
    /// Hop and end-to-end performance versus the CN link length.
    SweepLs,
    /// Performance along the orbit and its path average.
    SweepTheta,
    /// End-to-end outage over orbit placement and angle.
    OutageMap,
    /// Longest link of each hop meeting the outage target.
    MaxLength,
    /// Exhaustive constrained design search.
    Optimize,
    /// Print the effective scenario as TOML.
    ShowConfig,
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig, RunError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.montecarlo.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.montecarlo.samples = samples;
    }
    if cli.strict_truncation {
        cfg.montecarlo.strict_truncation = true;
    }
    if cli.no_prune {
        cfg.optimizer.prune_axis_order = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let cfg = scenario(cli)?;
    let command = match cli.command {
        Cmd::AtmosTable => Command::AtmosTable,
        Cmd::SweepLs => Command::SweepLs,
        Cmd::SweepTheta => Command::SweepTheta,
        Cmd::OutageMap => Command::OutageMap,
        Cmd::MaxLength => Command::MaxLength,
        Cmd::Optimize => Command::Optimize,
        Cmd::ShowConfig => {
            print!("{}", uav_backhaul::config::save_config(&cfg));
            return Ok(());
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let record = run_command(command, &cfg)?;
    let (csv, meta) = record.write(&out)?;
    println!("{}", csv.display());
    println!("{}", meta.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(RunError::Io(std::io::Error::other(e))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.payload());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
