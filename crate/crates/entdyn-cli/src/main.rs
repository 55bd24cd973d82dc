use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entdyn_cli::config::RunConfig;
use entdyn_cli::error::{CliError, EXIT_CONFIG_ERROR};
use entdyn_cli::runner::run_config;
use entdyn_cli::sweep::run_sweep;

/// Seeded certificate runner for entanglement-dynamics experiments.
#[derive(Parser)]
#[command(name = "entdyn", version, about)]
struct Cli {
    /// Worker threads (0 = one per core). Results are identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Treat statistical-trend failures as a nonzero exit, not just exact ones.
    #[arg(long, global = true)]
    strict: bool,

    /// Override the master seed of every loaded config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one JSON run config and write its artifacts.
    Run { config: PathBuf },
    /// Run every config in a directory (≥ 3 points, one experiment kind) and
    /// fit the sweep trends.
    Sweep { config_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("failed to size the worker pool: {err}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Run { config: path } => {
            let mut config = RunConfig::from_path(path)?;
            if let Some(seed) = cli.seed {
                config.master_seed = seed;
            }
            let out_dir = cli
                .out
                .clone()
                .or_else(|| config.output_dir.clone())
                .ok_or_else(|| {
                    CliError::Config(
                        "output_dir: not set in the config and no --out given".into(),
                    )
                })?;
            let outcome = run_config(&config, &out_dir)?;
            print!(
                "{}",
                std::fs::read_to_string(out_dir.join("summary.txt"))?
            );
            Ok(outcome.exit_code(cli.strict))
        }
        Command::Sweep { config_dir } => {
            let out_dir = cli
                .out
                .clone()
                .ok_or_else(|| CliError::Config("output_dir: sweeps require --out".into()))?;
            let outcome = run_sweep(config_dir, &out_dir, cli.seed)?;
            print!(
                "{}",
                std::fs::read_to_string(out_dir.join("sweep_summary.txt"))?
            );
            Ok(outcome.exit_code(cli.strict))
        }
    }
}
