//! `mql`: solve instances, play matches, print bound tables and run the
//! acceptance checks.
//!
//! Exit codes: 0 success, 1 verification or consistency failure, 2 usage
//! or feasibility error.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mql_core::Model;

#[derive(Parser)]
#[command(name = "mql", version, about = "Majority search with group queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact game value of one instance.
    Solve(SolveArgs),
    /// Play a questioner against an answer source.
    Play(PlayArgs),
    /// Bounds, exact values and measured worst cases for a range of n.
    Table(TableArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
    /// Solver worker threads.
    #[arg(long, env = "MQL_THREADS", default_value_t = 1)]
    pub threads: usize,
}

impl Common {
    pub fn format(&self) -> Format {
        if self.json { Format::Json } else { self.format }
    }
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = Model::Yn)]
    pub model: Model,
    /// Write the optimal strategy tree as JSON.
    #[arg(long, value_name = "PATH")]
    pub strategy_out: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args)]
pub struct PlayArgs {
    #[arg(long)]
    pub n: usize,
    /// Query arity; defaults to the questioner's.
    #[arg(long)]
    pub k: Option<usize>,
    /// Defaults to the only model the questioner or adversary supports, else yn.
    #[arg(long)]
    pub model: Option<Model>,
    /// majority3, majority3-full, majority3-gap, pairing-bins, pair-bins or optimal.
    #[arg(long)]
    pub questioner: String,
    /// honest, honest:<coloring>, partition, greedy or exact.
    #[arg(long)]
    pub adversary: String,
    /// Coloring for the honest oracle, e.g. RRRB.
    #[arg(long)]
    pub coloring: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = Model::Yn)]
    pub model: Model,
    #[arg(long, default_value_t = 4)]
    pub from: usize,
    #[arg(long, default_value_t = 12)]
    pub to: usize,
    /// Largest n to solve exactly.
    #[arg(long, default_value_t = 8)]
    pub max_exact: usize,
    /// Largest n to measure strategies exhaustively.
    #[arg(long, default_value_t = 12)]
    pub max_measured: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Only instances with n <= 6.
    #[arg(long)]
    pub fast: bool,
    /// Seed for the random transcript corpus.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Play(args) => commands::play(&args),
        Command::Table(args) => commands::table(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
