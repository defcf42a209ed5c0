use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use risac::config::parse_grid;
use risac::{run_experiment, write_outputs, AlgoSelector, Overrides, RunConfig, Sweep};

#[derive(Parser)]
#[command(name = "risac", version, about = "RIS-assisted ISAC beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write CSV results.
    Run {
        /// Scenario and experiment config (`key = value` lines).
        #[arg(long)]
        config: PathBuf,
        /// sre | benchmark | no-ris | all
        #[arg(long)]
        algo: Option<String>,
        /// gamma0 | ris-size | none
        #[arg(long)]
        sweep: Option<String>,
        /// Comma-separated sweep values (dB for gamma0, element counts for ris-size).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        algo,
        sweep,
        grid,
        trials,
        seed,
        out,
        jobs,
    } = Cli::parse().command;

    let overrides = || -> Result<Overrides, risac::ConfigError> {
        Ok(Overrides {
            algo: algo.as_deref().map(str::parse::<AlgoSelector>).transpose()?,
            sweep: sweep.as_deref().map(str::parse::<Sweep>).transpose()?,
            grid: grid.as_deref().map(parse_grid).transpose()?,
            trials,
            seed,
            out_dir: out,
            jobs,
        })
    };
    let cfg = match overrides().and_then(|ov| RunConfig::load(&config, &ov)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };

    let rows = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_outputs(&cfg.out_dir, &cfg, &rows) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let infeasible = rows.iter().filter(|r| !r.feasible).count();
    println!(
        "{} rows ({} infeasible) written to {}",
        rows.len(),
        infeasible,
        cfg.out_dir.display()
    );
    if infeasible == rows.len() {
        eprintln!("every row was infeasible");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
