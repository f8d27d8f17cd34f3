//! Batch front end: spectra, blocking-strategy games with certificates,
//! badness bounds and interval-exchange statistics.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "schmidt-flat", version, about = "Schmidt games on flat surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate saddle connections up to a length bound.
    Spectrum {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the strategy constants for a surface.
    Constants {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value = "1/16")]
        beta: String,
        #[arg(long, default_value_t = 40)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exact rational arithmetic instead of doubles.
        #[arg(long)]
        exact: bool,
    },
    /// Play the blocking strategy against a Bob and certify the result.
    Play {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value = "1/16")]
        beta: String,
        #[arg(long, default_value_t = 40)]
        rounds: usize,
        #[arg(long, default_value_t = 1000.0)]
        lmax: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `nearest`, `random` or `script:<transcript>`.
        #[arg(long, default_value = "nearest")]
        bob: String,
        /// Alice never blocks; the certificate should then fail.
        #[arg(long)]
        null_alice: bool,
        /// Certificate report path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the transcript.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Bound `min L²|θ − ψ|` over the spectrum.
    Badness {
        #[arg(long)]
        surface: PathBuf,
        /// Direction, as a rational or decimal.
        #[arg(long, conflicts_with = "transcript")]
        psi: Option<String>,
        /// Take the direction from a transcript's last Bob ball.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Orbit statistic of an interval exchange.
    Iet {
        #[arg(long)]
        iet: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        /// Repeat for every ordering of the lengths.
        #[arg(long)]
        reorder: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a transcript move by move and print it back.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("SCHMIDT_FLAT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("SCHMIDT_FLAT_THREADS={v:?}"))?;
    if n == 0 {
        bail!("SCHMIDT_FLAT_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Spectrum { surface, lmax, out } => emit(out.as_ref(), &commands::spectrum(&surface, lmax)?),
        Command::Constants { surface, beta, rounds, seed, out, exact } => {
            let text = if exact {
                commands::constants::<schmidt_flat::Rational>(&surface, &beta, rounds, seed)?
            } else {
                commands::constants::<f64>(&surface, &beta, rounds, seed)?
            };
            emit(out.as_ref(), &text)
        }
        Command::Play { surface, beta, rounds, lmax, seed, bob, null_alice, out, transcript, exact } => {
            let args = commands::PlayArgs { surface, beta, rounds, lmax, seed, bob, null_alice };
            let (report, tr) = if exact {
                commands::play::<schmidt_flat::Rational>(&args)?
            } else {
                commands::play::<f64>(&args)?
            };
            if let Some(p) = &transcript {
                std::fs::write(p, tr).with_context(|| format!("writing {}", p.display()))?;
            }
            emit(out.as_ref(), &report)
        }
        Command::Badness { surface, psi, transcript, lmax, out, exact } => {
            let source = match (psi, transcript) {
                (Some(p), None) => commands::Direction::Value(p),
                (None, Some(t)) => commands::Direction::Transcript(t),
                _ => bail!("give exactly one of --psi and --transcript"),
            };
            emit(out.as_ref(), &commands::badness(&surface, &source, lmax, exact)?)
        }
        Command::Iet { iet, horizon, reorder, out } => emit(out.as_ref(), &commands::iet(&iet, horizon, reorder)?),
        Command::Replay { transcript, out, exact } => {
            let text = if exact {
                commands::replay::<schmidt_flat::Rational>(&transcript)?
            } else {
                commands::replay::<f64>(&transcript)?
            };
            emit(out.as_ref(), &text)
        }
    }
}
