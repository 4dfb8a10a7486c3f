use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use retro_opt::harness::{aggregate_dir, run_experiment, self_check, sweep, ExperimentConfig};

#[derive(Parser)]
#[command(name = "retro-opt", version, about = "Run retrospective-approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all replications of an experiment config.
    Run { config: PathBuf },
    /// Gradient checks, schedule diagnostics, and a short smoke run.
    Check { config: PathBuf },
    /// Recompute aggregate.json from the trace files in a directory.
    Aggregate { dir: PathBuf },
    /// Run the experiment once per value of a config key.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...`, with a dotted key such as `schedule.c1`.
        #[arg(long)]
        param: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> retro_opt::Result<ExitCode> {
    match cmd {
        Command::Run { config } => {
            let out = run_experiment(&ExperimentConfig::from_path(&config)?)?;
            println!("{} replications written to {}", out.traces.len(), out.output_dir.display());
            for w in &out.aggregate.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Check { config } => {
            let report = self_check(&ExperimentConfig::from_path(&config)?)?;
            print!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Aggregate { dir } => {
            let agg = aggregate_dir(&dir)?;
            println!("aggregated {} traces in {}", agg.replications, dir.display());
        }
        Command::Sweep { config, param } => {
            let (key, values) = param.split_once('=').ok_or_else(|| retro_opt::Error::Config {
                key: "--param".into(),
                message: format!("expected key=v1,v2,..., got {param:?}"),
            })?;
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
            for out in sweep(&ExperimentConfig::from_path(&config)?, key, &values)? {
                println!("{}", out.output_dir.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
