//! `cavity-parity` — run, sweep and validate experiment configs.
//!
//! Exit codes: 0 success, 1 configuration error (unreadable file, unknown
//! experiment or key, bad value), 2 numerical failure (truncation leakage,
//! integrator breakdown, hygiene check) or I/O error while writing results.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_parity::exec::{available_workers, with_workers, Execution};
use cavity_parity::experiment::{
    run_experiment, run_sweep, validate_config, ExperimentConfig, RunContext, EXPERIMENTS,
};
use cavity_parity::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavity-parity", version, about = "Dispersive qubit-cavity parity-measurement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (sweep axes are ignored).
    Run(RunArgs),
    /// Run every point of the config's sweep.<key> axes.
    Sweep(RunArgs),
    /// Parse and check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available experiments.
    ListExperiments,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `out`, else results/<config name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the Fock-space truncation.
    #[arg(long)]
    fock_dim: Option<usize>,
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Protocol(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, u64, PathBuf), Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(d) = args.fock_dim {
        cfg.set("fock_dim", d.to_string());
    }
    let seed = match args.seed {
        Some(s) => s,
        None => cfg.count("seed")?.unwrap_or(0),
    };
    let out = args.out.clone().unwrap_or_else(|| match cfg.raw("out") {
        Some(o) => PathBuf::from(o),
        None => Path::new("results").join(
            args.config
                .file_stem()
                .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned()),
        ),
    });
    Ok((cfg, seed, out))
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::ListExperiments => {
            for (name, about, _) in EXPERIMENTS {
                println!("{name:<28} {about}");
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let n = validate_config(&cfg)?;
            println!("{}: ok ({} point{})", config.display(), n, if n == 1 { "" } else { "s" });
        }
        Command::Run(args) => {
            let (cfg, seed, out) = load(&args)?;
            let workers = args.workers.unwrap_or(0);
            let res = with_workers(workers, || run_experiment(&cfg, &RunContext::new(seed)))?;
            for p in res.write(&out)? {
                log::info!("wrote {}", p.display());
            }
            for (k, v) in &res.metrics {
                println!("{k} = {v}");
            }
            println!("results in {}", out.display());
        }
        Command::Sweep(args) => {
            let (cfg, seed, out) = load(&args)?;
            let workers = args.workers.unwrap_or(0);
            log::info!(
                "sweep over {} points on {} workers",
                cavity_parity::experiment::sweep_points(&cfg).len(),
                if workers == 0 { available_workers() } else { workers }
            );
            let sweep = with_workers(workers, || run_sweep(&cfg, seed, Execution::Parallel))?;
            let failed = sweep.points.iter().filter(|p| p.is_err()).count();
            let res = sweep.into_result(&cfg, seed);
            res.write(&out)?;
            println!("{} points, {failed} failed; results in {}", res.tables[0].rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
