use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hp_cli::describe::describe;
use hp_cli::error::CliError;
use hp_cli::run::{load_config, run, RunOptions};

#[derive(Parser)]
#[command(
    name = "hp",
    version,
    about = "Numerical checks of weighted Hardy-Poincaré inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job in a config and write one CSV per job.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the resolved instance and certified constant of one job.
    Describe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        job: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Run {
            config,
            out,
            jobs,
            seed,
        } => {
            if let Some(n) = jobs {
                if n == 0 {
                    return Err(CliError::Invalid {
                        field: "--jobs".into(),
                        message: "must be at least 1".into(),
                    });
                }
                // fails only if a pool already exists, which cannot happen here
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            let cfg = load_config(&config)?;
            let summary = run(&cfg, &RunOptions { out, seed })?;
            println!(
                "{} rows: {} passed, {} failed, {} errors; worst ratio {:.6}",
                summary.rows, summary.passed, summary.failed, summary.errors, summary.worst_ratio
            );
            Ok(if summary.all_passed() { 0 } else { 1 })
        }
        Command::Describe { config, job } => {
            let cfg = load_config(&config)?;
            print!("{}", describe(&cfg, &job)?);
            Ok(0)
        }
    }
}
