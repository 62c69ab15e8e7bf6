//! `qmvop`: coefficient tables, weights, evaluations, Gram matrices and
//! verification reports for the matrix-valued orthogonal polynomial families.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::{Opts, RunConfig};
use error::CliError;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "qmvop", version, about = "Matrix-valued orthogonal polynomials from five-term q-difference operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recurrence blocks Aₙ, Bₙ (scalar: five-term aₙ, bₙ, cₙ).
    Coeffs(Opts),
    /// Weight matrix samples on a t-grid in (0, π) (scalar: lattice masses).
    Weight(Opts),
    /// Pₙ(λ) on a grid (scalar: pₙ and φₙ).
    Eval(Opts),
    /// Gram matrices ∫ Pₙ W Pₘ* for n, m ≤ N.
    Gram(Opts),
    /// Run all checks for the family; exit 1 if any fails.
    Verify(Opts),
    /// Continuous and discrete spectrum (qsu2 only).
    Spectrum(Opts),
}

type Handler = fn(&RunConfig) -> Result<output::Output, CliError>;

fn run(cli: Cli) -> Result<bool, CliError> {
    let (opts, cmd): (&Opts, Handler) = match &cli.command {
        Command::Coeffs(o) => (o, commands::coeffs),
        Command::Weight(o) => (o, commands::weight),
        Command::Eval(o) => (o, commands::eval),
        Command::Gram(o) => (o, commands::gram),
        Command::Verify(o) => (o, commands::verify),
        Command::Spectrum(o) => (o, commands::spectrum),
    };
    let cfg = RunConfig::from_opts(opts)?;
    let out = cmd(&cfg)?;
    output::emit(&cfg, &out)?;
    // Only verify turns failed checks into a failing exit status.
    Ok(out.passed || !matches!(cli.command, Command::Verify(_)))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
