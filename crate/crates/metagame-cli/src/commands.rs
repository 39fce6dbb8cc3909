//! Subcommand implementations. Each command resolves parameters from
//! flags, the optional config file, and defaults (in that order), snapshots
//! the resolved configuration into the output directory, then writes its
//! artifacts there.

use crate::config::{require_file, Context};
use clap::Args;
use metagame::alpharank::{
    alpharank, finite_alpha_bound, response_graph, sample_complexity_finite_alpha,
    sample_complexity_infinite_alpha, AlphaRankParams, ComplexityInstance, PopulationMode,
    RankingDistribution,
};
use metagame::completion::{complete_and_rank, Transform};
use metagame::elo::{batch_elo_fit, OutcomeBatch};
use metagame::game::{
    generate_bernoulli_game, load_table_json, save_table_json, BernoulliSimulator,
    OutcomeSimulator, PayoffTensor,
};
use metagame::metrics::{edge_errors, kendall_partial, ranking_from_distribution};
use metagame::rgucb::{
    run_response_graph_ucb, run_symmetric_rgucb, IntervalMethod, RgucbResult, SamplingScheme,
    StoppingCriterion,
};
use metagame::uncertainty::{all_ranking_intervals, intervals_to_csv, PayoffBounds, UncertaintyParams};
use metagame::{rng, Error, Result};
use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::json;

const TIE_TOL: f64 = 1e-9;
const STATIONARY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------

/// Loads the game table named by the flag/config, or generates a random
/// constant-sum Bernoulli game with `n` strategies per player and the
/// given deviation gap.
fn load_or_generate(
    ctx: &Context,
    game: &Option<String>,
    n: usize,
    gap: f64,
    rng: &mut rng::Rng,
) -> Result<(PayoffTensor, String)> {
    match ctx.string(game, "game") {
        Some(path) => {
            require_file(&path)?;
            Ok((load_table_json(&path)?, path))
        }
        None => Ok((generate_bernoulli_game(n, gap, rng)?, "<generated>".into())),
    }
}

fn ranking_json(dist: &RankingDistribution) -> serde_json::Value {
    json!({
        "states": dist.states,
        "pi": dist.pi,
        "ordering": dist.ordering,
    })
}

fn parse_scheme(name: &str) -> Result<SamplingScheme> {
    match name.to_ascii_lowercase().as_str() {
        "u" | "uniform" => Ok(SamplingScheme::Uniform),
        "ue" | "uniform-exhaustive" => Ok(SamplingScheme::UniformExhaustive),
        "vw" | "valence-weighted" => Ok(SamplingScheme::ValenceWeighted),
        "cw" | "count-weighted" => Ok(SamplingScheme::CountWeighted),
        other => Err(Error::input(format!(
            "unknown scheme '{other}' (expected u, ue, vw or cw)"
        ))),
    }
}

fn parse_method(name: &str) -> Result<IntervalMethod> {
    match name.to_ascii_lowercase().as_str() {
        "hoeffding" => Ok(IntervalMethod::Hoeffding),
        "cp" | "clopper-pearson" => Ok(IntervalMethod::ClopperPearson),
        other => Err(Error::input(format!(
            "unknown interval method '{other}' (expected hoeffding or cp)"
        ))),
    }
}

fn parse_transform(name: &str) -> Result<Transform> {
    match name.to_ascii_lowercase().as_str() {
        "payoff" => Ok(Transform::Payoff),
        "logit" => Ok(Transform::Logit),
        "odds" => Ok(Transform::Odds),
        other => Err(Error::input(format!(
            "unknown transform '{other}' (expected payoff, logit or odds)"
        ))),
    }
}

/// Win matrix of player 1 in a two-player game, as rows over player 1's
/// strategies and columns over player 2's.
fn win_matrix(game: &PayoffTensor) -> Result<Vec<Vec<f64>>> {
    let shape = game.shape();
    if shape.num_players() != 2 {
        return Err(Error::input("this command needs a two-player game table"));
    }
    let (rows, cols) = (shape.strategy_counts()[0], shape.strategy_counts()[1]);
    let mut m = vec![vec![0.0; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            m[i][j] = game.get(0, &[i, j])?;
        }
    }
    Ok(m)
}

fn median_u64(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[values.len() / 2]
}

// ---------------------------------------------------------------------
// alpharank
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct AlpharankArgs {
    /// Payoff table (JSON) to rank.
    #[arg(long)]
    game: Option<String>,
    /// Finite selection intensity; omit for the infinite-intensity limit.
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated intensities for a sweep (writes sweep.csv).
    #[arg(long)]
    alphas: Option<String>,
    /// Population size of the fixation model.
    #[arg(long)]
    m: Option<u64>,
    /// Perturbation level for the infinite-intensity limit.
    #[arg(long)]
    perturbation: Option<f64>,
    /// Treat the game as symmetric with one shared population.
    #[arg(long)]
    single_population: bool,
}

pub fn cmd_alpharank(ctx: &Context, args: &AlpharankArgs) -> Result<()> {
    let path = ctx
        .string(&args.game, "game")
        .ok_or_else(|| Error::input("alpharank needs --game (or a 'game' config entry)"))?;
    require_file(&path)?;
    let game = load_table_json(&path)?;
    let m = ctx.u64(args.m, "m", 50) as u32;
    let perturbation = ctx.f64(args.perturbation, "perturbation", 1e-3);
    let alphas = ctx.f64_list(&args.alphas, "alphas", &[])?;

    ctx.prepare_out(
        "alpharank",
        json!({
            "game": path,
            "alpha": args.alpha,
            "alphas": alphas,
            "m": m,
            "perturbation": perturbation,
            "single_population": args.single_population,
        }),
    )?;

    let params_for = |alpha: Option<f64>| {
        let p = match alpha {
            Some(a) => AlphaRankParams::finite(a, m),
            None => AlphaRankParams::infinite(perturbation, m),
        };
        if args.single_population {
            p.single_population()
        } else {
            p
        }
    };

    let dist = alpharank(&game, &params_for(args.alpha), STATIONARY_TOL)?;
    ctx.write(
        "ranking.json",
        &(serde_json::to_string_pretty(&ranking_json(&dist)).unwrap() + "\n"),
    )?;

    if !alphas.is_empty() {
        let mut csv = String::from("alpha,state,pi\n");
        for &a in &alphas {
            let d = alpharank(&game, &params_for(Some(a)), STATIONARY_TOL)?;
            for (s, &mass) in d.pi.iter().enumerate() {
                csv.push_str(&format!("{a:?},{s},{mass:?}\n"));
            }
        }
        ctx.write("sweep.csv", &csv)?;
    }

    let top = &dist.ordering[0];
    println!(
        "ranked {} states; top bucket {:?} with mass {:.6}",
        dist.pi.len(),
        top,
        top.iter().map(|&s| dist.pi[s]).sum::<f64>()
    );
    Ok(())
}

// ---------------------------------------------------------------------
// rgucb
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct RgucbArgs {
    /// Payoff table (JSON); omitted means a generated Bernoulli game.
    #[arg(long)]
    game: Option<String>,
    /// Strategies per player for generated games.
    #[arg(long)]
    n: Option<usize>,
    /// Deviation gap for generated games.
    #[arg(long)]
    gap: Option<f64>,
    /// Failure probability.
    #[arg(long)]
    delta: Option<f64>,
    /// Sampling scheme: u, ue, vw or cw.
    #[arg(long)]
    scheme: Option<String>,
    /// Interval method: hoeffding or cp.
    #[arg(long)]
    method: Option<String>,
    /// Relaxed stopping tolerance (outcome units); omit for strict.
    #[arg(long)]
    relax: Option<f64>,
    /// Use the symmetric constant-sum variant (free transposed samples).
    #[arg(long)]
    symmetric: bool,
}

fn run_one_rgucb(
    sim: &BernoulliSimulator,
    delta: f64,
    scheme: SamplingScheme,
    criterion: StoppingCriterion,
    budget: u64,
    symmetric: bool,
    rng: &mut rng::Rng,
) -> Result<RgucbResult> {
    if symmetric {
        run_symmetric_rgucb(sim, delta, scheme, criterion, budget, rng)
    } else {
        run_response_graph_ucb(sim, delta, scheme, criterion, budget, rng)
    }
}

pub fn cmd_rgucb(ctx: &Context, args: &RgucbArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 4);
    let gap = ctx.f64(args.gap, "gap", 0.1);
    let delta = ctx.f64(args.delta, "delta", 0.1);
    let scheme_name = ctx.string(&args.scheme, "scheme").unwrap_or_else(|| "ue".into());
    let method_name = ctx.string(&args.method, "method").unwrap_or_else(|| "hoeffding".into());
    let scheme = parse_scheme(&scheme_name)?;
    let method = parse_method(&method_name)?;
    let relax = args.relax.or_else(|| ctx.f64_list(&None, "relax", &[]).ok().and_then(|v| v.first().copied()));
    let criterion = match relax {
        Some(eps) => StoppingCriterion::relaxed(method, eps),
        None => StoppingCriterion::strict(method),
    };

    let mut gen_rng = rng::stream(ctx.seed, u64::MAX);
    let (game, source) = load_or_generate(ctx, &args.game, n, gap, &mut gen_rng)?;
    ctx.prepare_out(
        "rgucb",
        json!({
            "game": source, "n": n, "gap": gap, "delta": delta,
            "scheme": scheme_name, "method": method_name,
            "relax": relax, "symmetric": args.symmetric,
        }),
    )?;
    if source == "<generated>" {
        save_table_json(&game, ctx.path("game.json"))?;
    }

    let truth = response_graph(&game);
    let sim = BernoulliSimulator::new(game.clone())
        .unwrap_or_else(|_| BernoulliSimulator::for_general_game(game.clone()));

    let mut samples = Vec::new();
    let mut truncated = 0u64;
    for t in 0..ctx.trials {
        let mut trial_rng = rng::stream(ctx.seed, t);
        let result = run_one_rgucb(&sim, delta, scheme, criterion, ctx.budget, args.symmetric, &mut trial_rng)?;
        let errors = edge_errors(&result.graph, &truth)?;
        ctx.write(&format!("history-{t}.jsonl"), &result.history_jsonl())?;
        let summary = json!({
            "trial": t,
            "samples": result.total_samples,
            "truncated": result.truncated,
            "edge_errors": errors,
        });
        ctx.write(
            &format!("summary-{t}.json"),
            &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
        )?;
        samples.push(result.total_samples);
        truncated += result.truncated as u64;
    }
    println!(
        "{} trials: median samples {}, {} truncated at budget {}",
        ctx.trials,
        median_u64(&mut samples),
        truncated,
        ctx.budget
    );
    Ok(())
}

// ---------------------------------------------------------------------
// sweep-rgucb
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct SweepRgucbArgs {
    /// Strategies per player for the generated games.
    #[arg(long)]
    n: Option<usize>,
    /// Deviation gap for the generated games.
    #[arg(long)]
    gap: Option<f64>,
    /// Comma-separated failure probabilities.
    #[arg(long)]
    deltas: Option<String>,
    /// Comma-separated schemes (u, ue, vw, cw).
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated criteria, e.g. hoeffding-strict,cp-relaxed.
    #[arg(long)]
    criteria: Option<String>,
    /// Tolerance used by relaxed criteria.
    #[arg(long)]
    relax: Option<f64>,
}

fn parse_criterion(name: &str, relax_eps: f64) -> Result<StoppingCriterion> {
    let (method_part, mode) = name
        .rsplit_once('-')
        .ok_or_else(|| Error::input(format!("criterion '{name}' must look like hoeffding-strict")))?;
    let method = parse_method(method_part)?;
    match mode {
        "strict" => Ok(StoppingCriterion::strict(method)),
        "relaxed" => Ok(StoppingCriterion::relaxed(method, relax_eps)),
        other => Err(Error::input(format!("unknown criterion mode '{other}'"))),
    }
}

pub fn cmd_sweep_rgucb(ctx: &Context, args: &SweepRgucbArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 4);
    let gap = ctx.f64(args.gap, "gap", 0.1);
    let deltas = ctx.f64_list(&args.deltas, "deltas", &[0.05, 0.1, 0.2])?;
    let relax_eps = ctx.f64(args.relax, "relax", 0.05);
    let scheme_names: Vec<String> = ctx
        .string(&args.schemes, "schemes")
        .unwrap_or_else(|| "u,ue,vw,cw".into())
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    let criterion_names: Vec<String> = ctx
        .string(&args.criteria, "criteria")
        .unwrap_or_else(|| "hoeffding-strict,hoeffding-relaxed".into())
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    for name in &scheme_names {
        parse_scheme(name)?;
    }
    for name in &criterion_names {
        parse_criterion(name, relax_eps)?;
    }

    ctx.prepare_out(
        "sweep-rgucb",
        json!({
            "n": n, "gap": gap, "deltas": deltas,
            "schemes": scheme_names, "criteria": criterion_names,
            "relax": relax_eps,
        }),
    )?;

    // One game per trial, shared across the scheme/criterion/delta grid so
    // cell comparisons are paired.
    let games: Vec<PayoffTensor> = (0..ctx.trials)
        .map(|t| generate_bernoulli_game(n, gap, &mut rng::stream(ctx.seed, t)))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for scheme_name in &scheme_names {
        for criterion_name in &criterion_names {
            for &delta in &deltas {
                for t in 0..ctx.trials {
                    cells.push((scheme_name.clone(), criterion_name.clone(), delta, t));
                }
            }
        }
    }

    let rows: Vec<Result<String>> = cells
        .par_iter()
        .enumerate()
        .map(|(cell_index, (scheme_name, criterion_name, delta, t))| {
            let scheme = parse_scheme(scheme_name)?;
            let criterion = parse_criterion(criterion_name, relax_eps)?;
            let game = &games[*t as usize];
            let truth = response_graph(game);
            let sim = BernoulliSimulator::new(game.clone())?;
            // Streams are offset past the game-generation streams so every
            // cell draws a fresh sequence.
            let mut trial_rng = rng::stream(ctx.seed, ctx.trials + cell_index as u64);
            let result =
                run_response_graph_ucb(&sim, *delta, scheme, criterion, ctx.budget, &mut trial_rng)?;
            let errors = edge_errors(&result.graph, &truth)?;
            Ok(format!(
                "{scheme_name},{criterion_name},{delta:?},{t},{},{errors},{}\n",
                result.total_samples, result.truncated
            ))
        })
        .collect();

    let mut csv = String::from("scheme,criterion,delta,trial,samples,edge_errors,truncated\n");
    for row in rows {
        csv.push_str(&row?);
    }
    ctx.write("sweep.csv", &csv)?;
    println!("wrote {} grid cells to {}", cells.len(), ctx.path("sweep.csv").display());
    Ok(())
}

// ---------------------------------------------------------------------
// uncertainty
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct UncertaintyArgs {
    /// Payoff table (JSON); intervals are propagated around it.
    #[arg(long)]
    game: Option<String>,
    /// Half-width of the payoff uncertainty band.
    #[arg(long)]
    width: Option<f64>,
    /// Explicit lower-bound table (overrides --width with --upper).
    #[arg(long)]
    lower: Option<String>,
    /// Explicit upper-bound table (overrides --width with --lower).
    #[arg(long)]
    upper: Option<String>,
    /// Population size of the fixation model.
    #[arg(long)]
    m: Option<u64>,
    /// Comma-separated perturbation levels swept in the limit.
    #[arg(long)]
    perturbations: Option<String>,
    /// Treat the game as symmetric with one shared population.
    #[arg(long)]
    single_population: bool,
}

pub fn cmd_uncertainty(ctx: &Context, args: &UncertaintyArgs) -> Result<()> {
    let m = ctx.u64(args.m, "m", 50) as u32;
    let width = ctx.f64(args.width, "width", 0.05);
    let perturbations =
        ctx.f64_list(&args.perturbations, "perturbations", &[1e-2, 1e-3, 1e-4])?;
    let lower_path = ctx.string(&args.lower, "lower");
    let upper_path = ctx.string(&args.upper, "upper");

    let (bounds, source) = match (&lower_path, &upper_path) {
        (Some(lo), Some(hi)) => {
            require_file(lo)?;
            require_file(hi)?;
            (
                PayoffBounds::new(load_table_json(lo)?, load_table_json(hi)?)?,
                format!("{lo} / {hi}"),
            )
        }
        (None, None) => {
            let path = ctx
                .string(&args.game, "game")
                .ok_or_else(|| Error::input("uncertainty needs --game or --lower/--upper"))?;
            require_file(&path)?;
            let game = load_table_json(&path)?;
            let clip = game.payoff_range();
            (PayoffBounds::around(&game, width, clip)?, path)
        }
        _ => return Err(Error::input("--lower and --upper must be given together")),
    };

    ctx.prepare_out(
        "uncertainty",
        json!({
            "game": source, "width": width, "m": m,
            "perturbations": perturbations,
            "single_population": args.single_population,
        }),
    )?;

    let params = UncertaintyParams {
        m,
        perturbations,
        mode: if args.single_population {
            PopulationMode::SinglePopulation
        } else {
            PopulationMode::MultiPopulation
        },
    };
    let intervals = all_ranking_intervals(&bounds, &params)?;
    ctx.write("intervals.csv", &intervals_to_csv(&intervals, width))?;
    let widest = intervals
        .iter()
        .map(|iv| iv.pi_hi - iv.pi_lo)
        .fold(0.0f64, f64::max);
    println!(
        "{} states; widest ranking-mass interval {:.6}",
        intervals.len(),
        widest
    );
    Ok(())
}

// ---------------------------------------------------------------------
// elo
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct EloArgs {
    /// Two-player payoff table (JSON); player 1 entries are win rates.
    #[arg(long)]
    game: Option<String>,
    /// Simulated head-to-head count behind each win rate.
    #[arg(long)]
    count_per_pair: Option<u64>,
    /// L2 regularization weight on the ratings.
    #[arg(long)]
    reg: Option<f64>,
}

pub fn cmd_elo(ctx: &Context, args: &EloArgs) -> Result<()> {
    let path = ctx
        .string(&args.game, "game")
        .ok_or_else(|| Error::input("elo needs --game (or a 'game' config entry)"))?;
    require_file(&path)?;
    let game = load_table_json(&path)?;
    let count = ctx.u64(args.count_per_pair, "count_per_pair", 100);
    let reg = ctx.f64(args.reg, "reg", 1e-6);

    ctx.prepare_out(
        "elo",
        json!({"game": path, "count_per_pair": count, "reg": reg}),
    )?;

    let rates = win_matrix(&game)?;
    let batch = OutcomeBatch::from_win_matrix(&rates, count)?;
    let ratings = batch_elo_fit(&batch, reg)?;
    ctx.write(
        "ratings.json",
        &(serde_json::to_string_pretty(&ratings.to_json()).unwrap() + "\n"),
    )?;
    let values = ratings.ratings();
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    println!(
        "fit {} ratings; strongest agent {} at {:.4}",
        values.len(),
        best.0,
        best.1
    );
    Ok(())
}

// ---------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct BoundsArgs {
    /// Strategies per player.
    #[arg(long)]
    n: Option<usize>,
    /// Number of players.
    #[arg(long)]
    players: Option<usize>,
    /// Maximum payoff magnitude.
    #[arg(long)]
    m_max: Option<f64>,
    /// Finite selection intensity (adds the finite-intensity bound).
    #[arg(long)]
    alpha: Option<f64>,
    /// Population size of the fixation model.
    #[arg(long)]
    m: Option<u64>,
    /// Target sup-norm error for the finite-intensity bound.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Failure probability.
    #[arg(long)]
    delta: Option<f64>,
    /// Minimum deviation-payoff gap.
    #[arg(long)]
    gap: Option<f64>,
}

pub fn cmd_bounds(ctx: &Context, args: &BoundsArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 4);
    let players = ctx.usize(args.players, "players", 2);
    let shape = metagame::game::GameShape::new(vec![n; players])?;
    let m = ctx.u64(args.m, "m", 50) as u32;
    let delta = ctx.f64(args.delta, "delta", 0.1);
    let gap = ctx.f64(args.gap, "gap", 0.1);
    let m_max = ctx.f64(args.m_max, "m_max", 1.0);
    let alpha = ctx.opt_f64(args.alpha, "alpha");
    let cap = metagame::alpharank::admissible_epsilon_cap(&shape);
    let epsilon = ctx.f64(args.epsilon, "epsilon", cap / 2.0);

    ctx.prepare_out(
        "bounds",
        json!({
            "n": n, "players": players, "m_max": m_max, "alpha": alpha,
            "m": m, "epsilon": epsilon, "delta": delta, "gap": gap,
        }),
    )?;

    let inst = ComplexityInstance { shape, m_max, alpha: alpha.unwrap_or(1.0), m, epsilon, delta, gap };
    let infinite = sample_complexity_infinite_alpha(&inst)?;
    let mut report = json!({
        "per_profile_samples_infinite_intensity": infinite,
        "epsilon_cap": cap,
    });
    println!(
        "infinite-intensity recovery: {infinite} samples per profile entry (delta {delta}, gap {gap})"
    );
    if alpha.is_some() {
        let finite = sample_complexity_finite_alpha(&inst)?;
        let bound = finite_alpha_bound(&inst)?;
        report["per_profile_samples_finite_intensity"] = json!(finite);
        report["finite_intensity_payoff_accuracy"] = json!(bound);
        println!(
            "finite-intensity (alpha {}): {finite} samples per profile entry, payoff accuracy {bound:.6e}",
            alpha.unwrap()
        );
    }
    ctx.write(
        "bounds.json",
        &(serde_json::to_string_pretty(&report).unwrap() + "\n"),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------
// gen-game
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct GenGameArgs {
    /// Strategies per player.
    #[arg(long)]
    n: Option<usize>,
    /// Minimum distance of off-diagonal win rates from 1/2.
    #[arg(long)]
    gap: Option<f64>,
}

pub fn cmd_gen_game(ctx: &Context, args: &GenGameArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 4);
    let gap = ctx.f64(args.gap, "gap", 0.1);
    ctx.prepare_out("gen-game", json!({"n": n, "gap": gap}))?;
    for t in 0..ctx.trials {
        let game = generate_bernoulli_game(n, gap, &mut rng::stream(ctx.seed, t))?;
        save_table_json(&game, ctx.path(&format!("game-{t}.json")))?;
    }
    println!(
        "wrote {} {n}x{n} Bernoulli games (gap {gap}) under {}",
        ctx.trials,
        ctx.path("").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------
// completion
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct CompletionArgs {
    /// Matrix size of the synthetic win-rate matrices.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated link transforms: payoff, logit, odds.
    #[arg(long)]
    transforms: Option<String>,
    /// Comma-separated factorization ranks.
    #[arg(long)]
    ranks: Option<String>,
    /// Comma-separated observation probabilities.
    #[arg(long)]
    obs_rates: Option<String>,
    /// Alternating-minimization sweeps.
    #[arg(long)]
    iters: Option<usize>,
}

/// Synthetic win-rate matrix sigma(a_i * b_j): exactly rank one in logit
/// space, so completion from partial observations is well posed.
fn synthetic_win_matrix(n: usize, rng: &mut rng::Rng) -> DMatrix<f64> {
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    DMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + (-a[i] * b[j]).exp()))
}

/// Bernoulli(`rate`) mask redrawn until every row and column keeps at
/// least `min_per_line` observations.
fn sample_mask(
    n: usize,
    rate: f64,
    min_per_line: usize,
    rng: &mut rng::Rng,
) -> Result<DMatrix<bool>> {
    for _ in 0..10_000 {
        let mask = DMatrix::from_fn(n, n, |_, _| rng.gen_bool(rate));
        let rows_ok =
            (0..n).all(|i| (0..n).filter(|&j| mask[(i, j)]).count() >= min_per_line);
        let cols_ok =
            (0..n).all(|j| (0..n).filter(|&i| mask[(i, j)]).count() >= min_per_line);
        if rows_ok && cols_ok {
            return Ok(mask);
        }
    }
    Err(Error::input(format!(
        "observation rate {rate} too sparse to keep {min_per_line} entries per row/column"
    )))
}

pub fn cmd_completion(ctx: &Context, args: &CompletionArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 8);
    let iters = ctx.usize(args.iters, "iters", 200);
    let transform_names: Vec<String> = ctx
        .string(&args.transforms, "transforms")
        .unwrap_or_else(|| "logit".into())
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    let ranks: Vec<usize> = ctx
        .f64_list(&args.ranks, "ranks", &[1.0, 2.0])?
        .into_iter()
        .map(|r| r as usize)
        .collect();
    let obs_rates = ctx.f64_list(&args.obs_rates, "obs_rates", &[0.5, 0.7, 0.9])?;
    for name in &transform_names {
        parse_transform(name)?;
    }
    let max_rank = ranks.iter().copied().max().unwrap_or(1);

    ctx.prepare_out(
        "completion",
        json!({
            "n": n, "transforms": transform_names, "ranks": ranks,
            "obs_rates": obs_rates, "iters": iters,
        }),
    )?;

    let params = AlphaRankParams::infinite(1e-3, 50);
    let mut csv = String::from("transform,rank,obs_rate,seed,kendall_error,underdetermined\n");
    for t in 0..ctx.trials {
        let mut trial_rng = rng::stream(ctx.seed, t);
        let truth = synthetic_win_matrix(n, &mut trial_rng);
        for name in &transform_names {
            let transform = parse_transform(name)?;
            for &rank in &ranks {
                for &rate in &obs_rates {
                    let mask = sample_mask(n, rate, max_rank.max(2), &mut trial_rng)?;
                    let fit = complete_and_rank(
                        &truth,
                        mask,
                        transform,
                        rank,
                        iters,
                        &params,
                        Some(&truth),
                        &mut trial_rng,
                    )?;
                    let err = fit.kendall_error.unwrap_or(f64::NAN);
                    csv.push_str(&format!(
                        "{name},{rank},{rate:?},{t},{err:?},{}\n",
                        fit.underdetermined
                    ));
                }
            }
        }
    }
    ctx.write("completion.csv", &csv)?;
    println!(
        "completion grid done: {} trials x {} transforms x {} ranks x {} rates",
        ctx.trials,
        transform_names.len(),
        ranks.len(),
        obs_rates.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------
// rank-error
// ---------------------------------------------------------------------

#[derive(Args)]
pub struct RankErrorArgs {
    /// Payoff table (JSON); omitted means a generated Bernoulli game.
    #[arg(long)]
    game: Option<String>,
    /// Strategies per player for generated games.
    #[arg(long)]
    n: Option<usize>,
    /// Deviation gap for generated games.
    #[arg(long)]
    gap: Option<f64>,
}

pub fn cmd_rank_error(ctx: &Context, args: &RankErrorArgs) -> Result<()> {
    let n = ctx.usize(args.n, "n", 4);
    let gap = ctx.f64(args.gap, "gap", 0.1);
    let mut gen_rng = rng::stream(ctx.seed, u64::MAX);
    let (game, source) = load_or_generate(ctx, &args.game, n, gap, &mut gen_rng)?;
    ctx.prepare_out("rank-error", json!({"game": source, "n": n, "gap": gap}))?;
    if source == "<generated>" {
        save_table_json(&game, ctx.path("game.json"))?;
    }

    let shape = game.shape().clone();
    let num_profiles = shape.num_profiles();
    let params = AlphaRankParams::infinite(1e-3, 50);
    let truth_dist = alpharank(&game, &params, STATIONARY_TOL)?;
    let truth_rank = ranking_from_distribution(&truth_dist, TIE_TOL);
    let sim = BernoulliSimulator::new(game.clone())
        .unwrap_or_else(|_| BernoulliSimulator::for_general_game(game.clone()));

    // Doubling grid of per-profile sample counts within the budget.
    let mut counts = Vec::new();
    let mut k = 1u64;
    while k * num_profiles as u64 <= ctx.budget {
        counts.push(k);
        k *= 2;
    }
    if counts.is_empty() {
        return Err(Error::input("budget too small for one sample per profile"));
    }

    let mut csv =
        String::from("trial,samples_per_profile,total_samples,kendall_error,frobenius_error\n");
    for t in 0..ctx.trials {
        let mut trial_rng = rng::stream(ctx.seed, t);
        let mut empirical = metagame::game::EmpiricalPayoffs::new(shape.clone());
        let mut drawn = 0u64;
        for &target in &counts {
            // Top up every profile to the target count, reusing earlier draws.
            for _ in drawn..target {
                for flat in 0..num_profiles {
                    let outcome = sim.simulate_flat(flat, &mut trial_rng);
                    empirical.record(flat, &outcome);
                }
            }
            drawn = target;
            let estimate = empirical.to_tensor(game.m_max(), 0.5)?;
            let dist = alpharank(&estimate, &params, STATIONARY_TOL)?;
            let est_rank = ranking_from_distribution(&dist, TIE_TOL);
            let kendall = kendall_partial(&truth_rank, &est_rank, 0.5)?;
            let mut sq = 0.0;
            for kplayer in 0..shape.num_players() {
                for flat in 0..num_profiles {
                    let d = estimate.get_flat(kplayer, flat) - game.get_flat(kplayer, flat);
                    sq += d * d;
                }
            }
            csv.push_str(&format!(
                "{t},{target},{},{kendall:?},{:?}\n",
                target * num_profiles as u64,
                sq.sqrt()
            ));
        }
    }
    ctx.write("errors.csv", &csv)?;
    println!(
        "wrote error curves for {} trials over per-profile counts {:?}",
        ctx.trials, counts
    );
    Ok(())
}
