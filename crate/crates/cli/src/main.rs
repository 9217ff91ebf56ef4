//! `guesswork`: exponents, exact moments, simulations, the password toy and
//! the acceptance checks from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 cap or guard violation, 3 a check
//! failed.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "guesswork", version, about = "Guesswork moments and exponents with side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymptotic exponent for one configuration, or a parameter sweep.
    Exponent(ExponentArgs),
    /// Exact finite-length moment by enumeration.
    Moment(MomentArgs),
    /// Monte Carlo moments over an n-grid, with an exponent fit.
    Simulate(SimulateArgs),
    /// Success curves for the password reuse toy.
    Toy(ToyArgs),
    /// Run the acceptance suite; exits 3 if any criterion fails.
    Check(CheckArgs),
    /// Position of x in the optimal list given y.
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Bec,
    Bsc,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Single,
    Centralized,
    Decentralized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Bits,
    Nats,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value = "bec")]
    pub channel: ChannelKind,
    /// ε for bec, δ for bsc.
    #[arg(long)]
    pub param: Option<f64>,
    /// JSON prior and channel for `--channel custom`.
    #[arg(long, required_if_eq("channel", "custom"))]
    pub channel_file: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of agents; with `--sweep`, the largest decentralized m.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "decentralized")]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "bits")]
    pub base: BaseArg,
    /// Refinement resolution of the general-channel optimizer.
    #[arg(long, default_value_t = 1e-3)]
    pub resolution: f64,
    /// Sweep the channel parameter over its default grid for centralized
    /// m=2 and decentralized m=1..M.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lengths: LengthArgs,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "decentralized")]
    pub strategy: StrategyArg,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct LengthArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive range `a:b:step`.
    #[arg(long)]
    pub n_grid: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub lengths: LengthArgs,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "decentralized")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    /// Password list; a seeded synthetic corpus is used when absent.
    #[arg(long)]
    pub corpus: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub top_k: usize,
    #[arg(long, default_value_t = guesswork_core::toy::DEFAULT_FLIP_PROB)]
    pub flip_prob: f64,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated budgets; defaults to 1, 2, 5, 10, ... up to 10^7.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: Format,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Secret sequence as input symbols, e.g. `0110`.
    #[arg(long)]
    pub x: String,
    /// Side information as output symbols, e.g. `0?10`.
    #[arg(long)]
    pub y: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_guard() { 2 } else { 1 })
        }
    }
}
