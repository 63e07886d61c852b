use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wassrate::harness::{self, output, ExperimentConfig, Setup};
use wassrate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "wassrate",
    version,
    about = "Convergence experiments for empirical Wasserstein distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean W_p against n and the fitted log-log slope.
    Rates(RunArgs),
    /// Measured rates next to every applicable bound.
    Bounds(RunArgs),
    /// Tail frequencies of W_p^p above its mean.
    Concentration(RunArgs),
    /// Invariants and lower bound of the multiscale construction.
    Multiscale(RunArgs),
    /// Covering-dimension ladder, d_n and m_n.
    Dims(RunArgs),
    /// Worst-case Lipschitz quadrature error of n-point rules (p = 1).
    Quadrature(RunArgs),
    /// k-means quantizers against empirical measures.
    Kmeans(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set out_dir".into()))?;
    Ok((config, out))
}

fn run(command: Command) -> Result<PathBuf> {
    let (args, default_p) = match &command {
        Command::Kmeans(a) => (a, 2.0),
        Command::Rates(a)
        | Command::Bounds(a)
        | Command::Concentration(a)
        | Command::Multiscale(a)
        | Command::Dims(a)
        | Command::Quadrature(a) => (a, 1.0),
    };
    let (config, out) = load(args)?;
    let setup = Setup::new(&config, default_p)?;
    let report = match command {
        Command::Rates(_) => output::rates_report(&harness::run_rate_experiment(&setup)?, &config)?,
        Command::Bounds(_) => output::bounds_report(&harness::run_bound_comparison(&setup)?, &config)?,
        Command::Concentration(_) => output::concentration_report(&harness::run_concentration(&setup)?, &config)?,
        Command::Multiscale(_) => output::multiscale_report(&harness::run_multiscale_converse(&setup)?)?,
        Command::Dims(_) => output::dims_report(&harness::run_dims(&setup)?, &setup.reference.proxy)?,
        Command::Quadrature(_) => output::quadrature_report(&harness::run_quadrature_demo(&setup)?)?,
        Command::Kmeans(_) => output::kmeans_report(&harness::run_kmeans_demo(&setup)?)?,
    };
    harness::write_report(&report, &config, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
