use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use openphase_cli::matrix::{jordan_report, DEFAULT_RANK_TOL};
use openphase_cli::{run, run_propagation, CliError, FigureId, RunConfig};

#[derive(Parser)]
#[command(name = "openphase", version, about = "Open-system geometric phases of STIRAP in a three-level system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a built-in figure: CSV plus gnuplot script.
    Figure {
        /// Figure id, e.g. emission, reversed, collision, pair-2g13, combined.
        #[arg(long)]
        id: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (0 = available cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the schedule of a TOML config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.dir of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jordan form of a matrix file (first line dim, then dim² lines "re im").
    Jordan {
        #[arg(long)]
        matrix: PathBuf,
        /// Eigenvalue cluster tolerance (default 1e-7·‖M‖).
        #[arg(long)]
        cluster_tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Integrate the master equation and write level populations over time.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        /// Initially populated level (1, 2 or 3).
        #[arg(long)]
        initial_level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    let written = match command {
        Command::Figure { id, out, threads } => {
            let mut config = RunConfig::for_figure(id.parse::<FigureId>()?);
            if let Some(threads) = threads {
                config.run.threads = threads;
            }
            config.output.dir = out.display().to_string();
            run(&config)?.write(&out)?
        }
        Command::Sweep { config, out } => {
            let config = RunConfig::from_file(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&config.output.dir));
            run(&config)?.write(&dir)?
        }
        Command::Jordan { matrix, cluster_tol, rank_tol } => {
            let text = std::fs::read_to_string(&matrix).map_err(|source| CliError::Io { path: matrix, source })?;
            print!("{}", jordan_report(&text, cluster_tol, rank_tol)?);
            Vec::new()
        }
        Command::Propagate { config, initial_level, out } => {
            let config = RunConfig::from_file(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&config.output.dir));
            run_propagation(&config, initial_level)?.write(&dir)?
        }
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
