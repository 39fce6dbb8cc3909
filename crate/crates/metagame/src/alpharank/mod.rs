//! Evolutionary ranking dynamics: transition models over strategy
//! profiles, stationary distributions, and the induced rankings.
//!
//! Transitions between single-deviation neighbors follow the fixation
//! model `eta * (1 - exp(-a*d)) / (1 - exp(-a*m*d))` for payoff difference
//! `d != 0` and `eta / m` for ties, where `eta` is the reciprocal of the
//! number of single-deviation neighbors. The infinite-selection limit
//! replaces the ratio with 1 for improving deviations and with a small
//! perturbation `eps_p` for worsening ones, which keeps the chain
//! irreducible.

mod complexity;
mod graph;

pub use complexity::{
    admissible_epsilon_cap, finite_alpha_bound, sample_complexity_finite_alpha,
    sample_complexity_infinite_alpha, ComplexityInstance,
};
pub use graph::{find_mccs, response_graph, EdgeKind, ResponseEdge, ResponseGraph};

use crate::game::PayoffTensor;
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Selection intensity: finite `alpha`, or the infinite limit with an
/// explicit perturbation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Finite(f64),
    Infinite { perturbation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationMode {
    /// States are full strategy profiles; one population per player.
    MultiPopulation,
    /// States are the strategies of a single shared population
    /// (two-player symmetric games).
    SinglePopulation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRankParams {
    pub selection: Selection,
    /// Population size of the fixation model; ties transition with
    /// probability `eta / m`.
    pub m: u32,
    pub mode: PopulationMode,
}

impl AlphaRankParams {
    pub fn finite(alpha: f64, m: u32) -> Self {
        AlphaRankParams {
            selection: Selection::Finite(alpha),
            m,
            mode: PopulationMode::MultiPopulation,
        }
    }

    pub fn infinite(perturbation: f64, m: u32) -> Self {
        AlphaRankParams {
            selection: Selection::Infinite { perturbation },
            m,
            mode: PopulationMode::MultiPopulation,
        }
    }

    pub fn single_population(mut self) -> Self {
        self.mode = PopulationMode::SinglePopulation;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::input("population size m must be at least 2"));
        }
        match self.selection {
            Selection::Finite(a) if !(a.is_finite() && a >= 0.0) => {
                Err(Error::input("alpha must be finite and nonnegative"))
            }
            Selection::Infinite { perturbation } if !(0.0..1.0).contains(&perturbation)
                || perturbation == 0.0 =>
            {
                Err(Error::input("perturbation must lie in (0, 1)"))
            }
            _ => Ok(()),
        }
    }
}

/// A row-stochastic Markov transition model over an ordered state list.
///
/// In multi-population mode states are strategy profiles; in
/// single-population mode they are the strategies of player 1.
#[derive(Debug, Clone)]
pub struct TransitionModel {
    /// State labels: a full profile per state, or a single strategy index
    /// wrapped in a one-element vector.
    pub states: Vec<Vec<usize>>,
    pub matrix: DMatrix<f64>,
    pub eta: f64,
}

/// Single-deviation structure feeding the transition kernel: for each
/// state, its neighbors and the deviating player's payoff difference
/// `d = M(neighbor) - M(state)`.
struct DeviationGraph {
    states: Vec<Vec<usize>>,
    /// `edges[s]` lists `(neighbor, d)`.
    edges: Vec<Vec<(usize, f64)>>,
    eta: f64,
}

fn deviation_graph(game: &PayoffTensor, mode: PopulationMode) -> Result<DeviationGraph> {
    match mode {
        PopulationMode::MultiPopulation => {
            let shape = game.shape();
            let states = shape.profiles().collect();
            let edges = (0..shape.num_profiles())
                .map(|flat| {
                    shape
                        .neighbors(flat)
                        .into_iter()
                        .map(|(k, nb)| (nb, game.get_flat(k, nb) - game.get_flat(k, flat)))
                        .collect()
                })
                .collect();
            Ok(DeviationGraph {
                states,
                edges,
                eta: shape.eta(),
            })
        }
        PopulationMode::SinglePopulation => {
            let counts = game.shape().strategy_counts();
            if counts.len() != 2 || counts[0] != counts[1] {
                return Err(Error::input(
                    "single-population mode needs a two-player game with equal strategy counts",
                ));
            }
            let n = counts[0];
            if n < 2 {
                return Err(Error::input("need at least 2 strategies"));
            }
            // Mutant-vs-incumbent comparison: transition from incumbent s to
            // mutant t is driven by d = M^1(t, s) - M^1(s, t).
            let states = (0..n).map(|i| vec![i]).collect();
            let edges = (0..n)
                .map(|s| {
                    (0..n)
                        .filter(|&t| t != s)
                        .map(|t| {
                            let d = game.get_flat(0, t * n + s) - game.get_flat(0, s * n + t);
                            (t, d)
                        })
                        .collect()
                })
                .collect();
            Ok(DeviationGraph {
                states,
                edges,
                eta: 1.0 / (n - 1) as f64,
            })
        }
    }
}

/// `ln(e^y - 1)` for `y > 0`, stable across the whole range.
pub(crate) fn ln_expm1(y: f64) -> f64 {
    if y < 1.0 {
        y.exp_m1().ln()
    } else {
        y + (-(-y).exp()).ln_1p()
    }
}

/// Fixation factor `(1 - e^{-a d}) / (1 - e^{-a m d})` of the transition
/// kernel, evaluated in log space where the naive form would overflow.
///
/// The `d == 0` (and `a == 0`) limit is `1/m`.
pub(crate) fn fixation_factor(alpha: f64, m: u32, d: f64) -> f64 {
    let m_f = m as f64;
    if d == 0.0 || alpha == 0.0 {
        return 1.0 / m_f;
    }
    let x = alpha * d;
    let mx = alpha * m_f * d;
    if x > 0.0 {
        // numerator and denominator both in (0, 1]
        (-(-x).exp_m1()) / (-(-mx).exp_m1())
    } else {
        // (e^{-x} - 1) / (e^{-mx} - 1) with -x > 0, via logs
        (ln_expm1(-x) - ln_expm1(-mx)).exp()
    }
}

/// Transition matrix of the finite-selection model.
pub fn build_transition_matrix(
    game: &PayoffTensor,
    params: &AlphaRankParams,
) -> Result<TransitionModel> {
    params.validate()?;
    let alpha = match params.selection {
        Selection::Finite(a) => a,
        Selection::Infinite { .. } => {
            return Err(Error::input(
                "build_transition_matrix needs finite selection; use build_infinite_alpha_transitions",
            ))
        }
    };
    let dev = deviation_graph(game, params.mode)?;
    Ok(assemble(dev, |d| fixation_factor(alpha, params.m, d)))
}

/// Transition matrix of the infinite-selection model with perturbation
/// `eps_p`: improving deviations get `eta`, worsening ones `eta * eps_p`,
/// ties `eta / m`; the diagonal absorbs the remainder.
pub fn build_infinite_alpha_transitions(
    game: &PayoffTensor,
    params: &AlphaRankParams,
) -> Result<TransitionModel> {
    params.validate()?;
    let eps = match params.selection {
        Selection::Infinite { perturbation } => perturbation,
        Selection::Finite(_) => {
            return Err(Error::input(
                "build_infinite_alpha_transitions needs infinite selection",
            ))
        }
    };
    let m_f = params.m as f64;
    let dev = deviation_graph(game, params.mode)?;
    Ok(assemble(dev, |d| {
        if d > 0.0 {
            1.0
        } else if d < 0.0 {
            eps
        } else {
            1.0 / m_f
        }
    }))
}

fn assemble(dev: DeviationGraph, factor: impl Fn(f64) -> f64) -> TransitionModel {
    let n = dev.states.len();
    let mut matrix = DMatrix::zeros(n, n);
    for (s, edges) in dev.edges.iter().enumerate() {
        let mut off_diag = 0.0;
        for &(t, d) in edges {
            let p = dev.eta * factor(d);
            matrix[(s, t)] = p;
            off_diag += p;
        }
        matrix[(s, s)] = (1.0 - off_diag).max(0.0);
    }
    TransitionModel {
        states: dev.states,
        matrix,
        eta: dev.eta,
    }
}

/// The invariant distribution and its induced ordering.
#[derive(Debug, Clone)]
pub struct RankingDistribution {
    pub states: Vec<Vec<usize>>,
    pub pi: Vec<f64>,
    /// State indices grouped into descending-mass tie buckets.
    pub ordering: Vec<Vec<usize>>,
}

impl RankingDistribution {
    pub fn from_pi(states: Vec<Vec<usize>>, pi: Vec<f64>, tie_tol: f64) -> Self {
        let ordering = group_by_mass(&pi, tie_tol);
        RankingDistribution {
            states,
            pi,
            ordering,
        }
    }
}

/// Group state indices into descending tie buckets; masses within
/// `tie_tol` of a bucket's representative share the bucket.
pub fn group_by_mass(pi: &[f64], tie_tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| pi[b].partial_cmp(&pi[a]).unwrap().then(a.cmp(&b)));
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match buckets.last_mut() {
            Some(bucket) if (pi[bucket[0]] - pi[idx]).abs() <= tie_tol => bucket.push(idx),
            _ => buckets.push(vec![idx]),
        }
    }
    buckets
}

/// Default tie tolerance for ordering masses into buckets.
pub const DEFAULT_TIE_TOL: f64 = 1e-8;

const DENSE_SOLVE_LIMIT: usize = 512;
const POWER_ITER_CAP: usize = 1_000_000;

/// Stationary distribution of a row-stochastic, irreducible transition
/// model: a dense linear solve at desk scale, power iteration beyond.
pub fn stationary_distribution(model: &TransitionModel, tol: f64) -> Result<RankingDistribution> {
    let pi = stationary_vector(&model.matrix, tol)?;
    Ok(RankingDistribution::from_pi(
        model.states.clone(),
        pi,
        DEFAULT_TIE_TOL,
    ))
}

pub(crate) fn stationary_vector(matrix: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    if n <= DENSE_SOLVE_LIMIT {
        if let Some(pi) = dense_stationary(matrix) {
            let residual = stationary_residual(matrix, &pi);
            if residual <= tol {
                return Ok(pi);
            }
        }
    }
    power_iteration(matrix, tol)
}

/// Solve `pi C = pi`, `sum pi = 1` as a linear system in `C^T - I` with the
/// last equation replaced by the normalization constraint.
fn dense_stationary(matrix: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = matrix.nrows();
    let mut a = matrix.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DMatrix::zeros(n, 1);
    b[(n - 1, 0)] = 1.0;
    let lu = a.lu();
    let x = lu.solve(&b)?;
    let mut pi: Vec<f64> = x.column(0).iter().copied().collect();
    let sum: f64 = pi.iter().sum();
    if !sum.is_finite() || sum <= 0.0 {
        return None;
    }
    for v in &mut pi {
        *v = (*v / sum).max(0.0);
    }
    let sum: f64 = pi.iter().sum();
    for v in &mut pi {
        *v /= sum;
    }
    Some(pi)
}

fn power_iteration(matrix: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_ITER_CAP {
        next.iter_mut().for_each(|v| *v = 0.0);
        for s in 0..n {
            let mass = pi[s];
            if mass == 0.0 {
                continue;
            }
            for t in 0..n {
                next[t] += mass * matrix[(s, t)];
            }
        }
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= sum);
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if residual <= tol {
            return Ok(pi);
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITER_CAP,
        residual,
    })
}

pub(crate) fn stationary_residual(matrix: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let n = matrix.nrows();
    let mut residual = 0.0f64;
    for t in 0..n {
        let mut v = -pi[t];
        for s in 0..n {
            v += pi[s] * matrix[(s, t)];
        }
        residual = residual.max(v.abs());
    }
    residual
}

/// Perturbation sweep used by infinite-selection runs: geometric levels
/// from 1e-1 down to 1e-8.
pub const PERTURBATION_SWEEP: [f64; 8] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Full ranking pipeline: build the transition model, solve for the
/// invariant distribution, order the masses.
///
/// In infinite-selection mode the perturbation level is swept downward
/// from the requested level; the result of the first level whose ordering
/// agrees with its successor is returned (the last level otherwise).
pub fn alpharank(
    game: &PayoffTensor,
    params: &AlphaRankParams,
    tol: f64,
) -> Result<RankingDistribution> {
    params.validate()?;
    match params.selection {
        Selection::Finite(_) => {
            let model = build_transition_matrix(game, params)?;
            stationary_distribution(&model, tol)
        }
        Selection::Infinite { perturbation } => {
            let levels: Vec<f64> = PERTURBATION_SWEEP
                .iter()
                .copied()
                .filter(|&e| e <= perturbation)
                .collect();
            let levels = if levels.is_empty() {
                vec![perturbation]
            } else {
                levels
            };
            let mut prev: Option<RankingDistribution> = None;
            for &eps in &levels {
                let mut p = *params;
                p.selection = Selection::Infinite { perturbation: eps };
                let model = build_infinite_alpha_transitions(game, &p)?;
                let current = stationary_distribution(&model, tol)?;
                if let Some(prev) = prev {
                    if prev.ordering == current.ordering {
                        return Ok(current);
                    }
                }
                prev = Some(current);
            }
            Ok(prev.expect("at least one sweep level"))
        }
    }
}
