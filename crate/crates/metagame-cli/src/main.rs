//! Command-line harness around the `metagame` library: ranking runs,
//! adaptive-sampling sweeps, uncertainty propagation, Elo fits, complexity
//! calculators and completion grids, all reproducible from (config, seed).

mod commands;
mod config;

use clap::{Parser, Subcommand};
use metagame::Error;

#[derive(Parser)]
#[command(name = "metagame", version, about = "Meta-game evaluation and ranking experiments")]
struct Cli {
    /// JSON config file with subcommand parameters; explicit flags win.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Master seed; trial t uses the derived stream (seed, t).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of independent trials for stochastic experiments.
    #[arg(long, global = true, default_value_t = 20)]
    trials: u64,
    /// Output directory (created if missing; receives a config snapshot).
    #[arg(long, global = true, default_value = "out")]
    out: String,
    /// Per-run sample budget cap.
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank a payoff table with the evolutionary ranking model.
    Alpharank(commands::AlpharankArgs),
    /// Run the adaptive response-graph sampler on a table or generated game.
    Rgucb(commands::RgucbArgs),
    /// Scheme x criterion x delta x trial grid of sampler runs.
    SweepRgucb(commands::SweepRgucbArgs),
    /// Propagate payoff bounds into ranking-weight intervals.
    Uncertainty(commands::UncertaintyArgs),
    /// Fit batch Elo ratings to a win-rate table.
    Elo(commands::EloArgs),
    /// Print sample-complexity bounds for a game shape.
    Bounds(commands::BoundsArgs),
    /// Generate a random constant-sum Bernoulli game table.
    GenGame(commands::GenGameArgs),
    /// Low-rank completion grid over transforms, ranks and observation rates.
    Completion(commands::CompletionArgs),
    /// Ranking/payoff error versus sample count on one game.
    RankError(commands::RankErrorArgs),
}

fn main() {
    let cli = Cli::parse();
    let ctx = match config::Context::new(&cli.config, cli.seed, cli.trials, &cli.out, cli.budget) {
        Ok(ctx) => ctx,
        Err(e) => exit_with(e),
    };
    let result = match &cli.command {
        Command::Alpharank(args) => commands::cmd_alpharank(&ctx, args),
        Command::Rgucb(args) => commands::cmd_rgucb(&ctx, args),
        Command::SweepRgucb(args) => commands::cmd_sweep_rgucb(&ctx, args),
        Command::Uncertainty(args) => commands::cmd_uncertainty(&ctx, args),
        Command::Elo(args) => commands::cmd_elo(&ctx, args),
        Command::Bounds(args) => commands::cmd_bounds(&ctx, args),
        Command::GenGame(args) => commands::cmd_gen_game(&ctx, args),
        Command::Completion(args) => commands::cmd_completion(&ctx, args),
        Command::RankError(args) => commands::cmd_rank_error(&ctx, args),
    };
    if let Err(e) = result {
        exit_with(e);
    }
}

fn exit_with(e: Error) -> ! {
    eprintln!("error: {e}");
    let code = match e {
        Error::Input(_) | Error::Format(_) => 2,
        _ => 1,
    };
    std::process::exit(code);
}
