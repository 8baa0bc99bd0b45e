//! Thin command-line front end: parse a JSON config, dispatch to the
//! library runner, write the artifact. Exit codes: 0 success, 1 invalid
//! config or I/O failure, 2 solver non-convergence under `--strict`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lr_erm::config::{
    ConcentrationConfig, ConsistencyConfig, KernelConfig, PathConfig, SobolevConfig, SolveConfig,
};
use lr_erm::runner::{
    run_concentration, run_consistency_cmd, run_kernel, run_path_cmd, run_sobolev, run_solve,
    RunSummary,
};
use lr_erm::{Error, Result};

#[derive(Parser)]
#[command(name = "lr-erm", version, about = "Regularized ERM in ℓ^r feature spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Master seed for every random stream in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel cells (default: all cores). Outputs do
    /// not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 2 if any solve fails to reach tolerance.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one regularized ERM instance; writes a solution JSON.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep sample sizes and seeds under a λ_n schedule; writes a CSV plus
    /// a .meta.json sidecar with the schedule validity flags.
    Consistency {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a fixed sample along a decreasing λ grid; writes a CSV.
    Path {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo check of the vector-valued Hoeffding bound; writes a CSV.
    Concentration {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the Sobolev p-kernel on [0,1]; writes a CSV. Either --config
    /// or --p selects the exponent.
    Sobolev {
        #[arg(long, conflicts_with = "p")]
        config: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a dictionary kernel with its identity residuals; writes a CSV.
    Kernel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        context: format!("{}", path.display()),
        source: e,
    })
}

fn dispatch(cli: &Cli) -> Result<RunSummary> {
    match &cli.cmd {
        Cmd::Solve { config, out } => run_solve(&load::<SolveConfig>(config)?, out),
        Cmd::Consistency { config, out } => {
            run_consistency_cmd(&load::<ConsistencyConfig>(config)?, cli.seed, out)
        }
        Cmd::Path { config, out } => run_path_cmd(&load::<PathConfig>(config)?, cli.seed, out),
        Cmd::Concentration { config, out } => {
            run_concentration(&load::<ConcentrationConfig>(config)?, cli.seed, out)
        }
        Cmd::Sobolev { config, p, out } => {
            let cfg = match (config, p) {
                (Some(path), None) => load::<SobolevConfig>(path)?,
                (None, Some(p)) => SobolevConfig { p: *p, grid: 21 },
                (None, None) => {
                    return Err(Error::invalid("sobolev needs either --config or --p"))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects --config with --p"),
            };
            run_sobolev(&cfg, out)
        }
        Cmd::Kernel { config, out } => run_kernel(&load::<KernelConfig>(config)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(summary) => {
            if summary.nonconverged > 0 {
                eprintln!("warning: {} solve(s) did not reach tolerance", summary.nonconverged);
                if cli.strict {
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
