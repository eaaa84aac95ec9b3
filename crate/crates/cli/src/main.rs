//! `twistlab`: batch experiments on twisted L-functions over `F_q(t)`.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Config, Overrides};
use crate::error::CliError;
use crate::output::{write_report, Meta, Report};

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Experiments on L-functions of twists over rational function fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV files and summary.txt.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides `experiment.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `experiment.budget`.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// One L-polynomial and its functional equation.
    Lpoly,
    /// Zeta numerators of covers against the product over orbits.
    Factorize,
    /// Predicted forced factors against computed L-polynomials.
    ForcedZeros,
    /// Exceptional types over a grid of (n, orbit, alpha).
    Classify,
    /// Density of good twists against the lower bound.
    Density,
    /// Trace moments of Frobenius classes against Haar baselines.
    Equidist,
    /// Parity of ord L(E/K) over quadratic extensions.
    Heegner,
    /// Zeta numerators of cyclic covers.
    ZetaCover,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lpoly => "lpoly",
            Command::Factorize => "factorize",
            Command::ForcedZeros => "forced-zeros",
            Command::Classify => "classify",
            Command::Density => "density",
            Command::Equidist => "equidist",
            Command::Heegner => "heegner",
            Command::ZetaCover => "zeta-cover",
        }
    }

    fn run(self, cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
        match self {
            Command::Lpoly => commands::lpoly(cfg, ov),
            Command::Factorize => commands::factorize(cfg, ov),
            Command::ForcedZeros => commands::forced_zeros(cfg, ov),
            Command::Classify => commands::classify(cfg, ov),
            Command::Density => commands::density(cfg, ov),
            Command::Equidist => commands::equidist(cfg, ov),
            Command::Heegner => commands::heegner(cfg, ov),
            Command::ZetaCover => commands::zeta_cover(cfg, ov),
        }
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = Config::load(path)?;
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        twistlab::par::init_threads(k);
    }
    let ov = Overrides { seed: cli.seed, budget: cli.budget };
    let report = cli.command.run(&cfg, ov)?;
    let meta = Meta {
        command: cli.command.name().to_string(),
        config: path.clone(),
        seed: cli.seed.or_else(|| cfg.experiment.as_ref().and_then(|e| e.seed)),
    };
    write_report(&cli.out, &meta, &report)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    eprintln!("assertion failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("twistlab {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
