use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Seeded experiments with quantum search, evolution strategies and exhaustive
/// oracles for SAT and TSP.
#[derive(Debug, Parser)]
#[command(name = "npduel", version)]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// RNG seed.
    #[arg(long, global = true, env = "NPDUEL_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Measurement shots for sampling commands.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// ES generation budget.
    #[arg(long, global = true, default_value_t = 1000)]
    pub max_generations: u64,

    #[arg(long, global = true, value_enum, default_value_t = RecombinationArg::Default)]
    pub recombination: RecombinationArg,

    /// Resource cap: variable bound for SAT commands, trajectory count for
    /// `tsp cerny`, permutation count for `tsp brute`.
    #[arg(long, global = true)]
    pub cap: Option<u128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecombinationArg {
    None,
    Default,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SAT experiments on a DIMACS CNF file.
    #[command(subcommand)]
    Sat(SatCommand),
    /// TSP experiments on a JSON instance `{"m": .., "d": [[..]]}`.
    #[command(subcommand)]
    Tsp(TspCommand),
}

#[derive(Debug, Subcommand)]
pub enum SatCommand {
    /// Count and list satisfying assignments by enumeration.
    Brute { path: PathBuf },
    /// Prepare the uniform register, apply U_f and measure the flag qubit.
    Sample { path: PathBuf },
    /// Amplitude amplification with the iteration count planned from r.
    Grover { path: PathBuf },
    /// (15,100) evolution strategy on the relaxed formula.
    Es { path: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum TspCommand {
    /// Simulate the slit-array machine and cross-check with the oracle.
    Cerny { path: PathBuf },
    /// Exhaustive permutation search.
    Brute { path: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sat(SatCommand::Brute { .. }) => "sat brute",
            Command::Sat(SatCommand::Sample { .. }) => "sat sample",
            Command::Sat(SatCommand::Grover { .. }) => "sat grover",
            Command::Sat(SatCommand::Es { .. }) => "sat es",
            Command::Tsp(TspCommand::Cerny { .. }) => "tsp cerny",
            Command::Tsp(TspCommand::Brute { .. }) => "tsp brute",
        }
    }

    pub fn path(&self) -> &PathBuf {
        match self {
            Command::Sat(
                SatCommand::Brute { path }
                | SatCommand::Sample { path }
                | SatCommand::Grover { path }
                | SatCommand::Es { path },
            )
            | Command::Tsp(TspCommand::Cerny { path } | TspCommand::Brute { path }) => path,
        }
    }
}
