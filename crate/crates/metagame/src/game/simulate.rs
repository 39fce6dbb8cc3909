//! Noisy outcome simulation and random game generation.

use super::{GameShape, PayoffTensor};
use crate::rng::Rng;
use crate::{Error, Result};
use rand::Rng as _;

/// A source of noisy per-profile outcomes.
///
/// Implementations must be deterministic given the RNG state: repeated
/// calls with an identical random-state sequence produce identical
/// outcomes.
pub trait OutcomeSimulator {
    fn shape(&self) -> &GameShape;

    /// Outcome range `[a, b]` shared by all players' observations.
    fn outcome_range(&self) -> (f64, f64);

    /// One noisy outcome vector (one payoff per player) for the profile at
    /// the given flat index.
    fn simulate_flat(&self, flat: usize, rng: &mut Rng) -> Vec<f64>;

    fn simulate(&self, profile: &[usize], rng: &mut Rng) -> Result<Vec<f64>> {
        let flat = self.shape().flat_index(profile)?;
        Ok(self.simulate_flat(flat, rng))
    }
}

/// Bernoulli outcome simulator: each player's observation is drawn from a
/// two-point distribution with the true expected payoff as its mean.
///
/// Games whose payoffs lie outside `[0, 1]` are affinely rescaled to `[0,1]`
/// for the draw and outcomes are mapped back, so empirical means converge to
/// the original table. The declared outcome range is the affine image
/// `[a, b]` of `{0, 1}`.
pub struct BernoulliSimulator {
    game: PayoffTensor,
    lo: f64,
    hi: f64,
}

impl BernoulliSimulator {
    /// Simulator for a game with payoffs already in `[0, 1]`.
    pub fn new(game: PayoffTensor) -> Result<Self> {
        if !game.is_unit_range() {
            return Err(Error::input(
                "payoff entry outside [0, 1]; use for_general_game to rescale",
            ));
        }
        Ok(BernoulliSimulator {
            game,
            lo: 0.0,
            hi: 1.0,
        })
    }

    /// Simulator for an arbitrary bounded game: payoffs are mapped through
    /// the affine map `[-m_max, m_max] -> [0, 1]` for the Bernoulli draw and
    /// outcomes are reported in the original units.
    pub fn for_general_game(game: PayoffTensor) -> Self {
        let m = game.m_max();
        BernoulliSimulator {
            game,
            lo: -m,
            hi: m,
        }
    }

    pub fn game(&self) -> &PayoffTensor {
        &self.game
    }
}

impl OutcomeSimulator for BernoulliSimulator {
    fn shape(&self) -> &GameShape {
        self.game.shape()
    }

    fn outcome_range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn simulate_flat(&self, flat: usize, rng: &mut Rng) -> Vec<f64> {
        let width = self.hi - self.lo;
        (0..self.shape().num_players())
            .map(|k| {
                let p = (self.game.get_flat(k, flat) - self.lo) / width;
                if rng.gen::<f64>() < p {
                    self.hi
                } else {
                    self.lo
                }
            })
            .collect()
    }
}

/// Draw a 0/1 outcome vector per player for a game with payoffs in `[0,1]`.
pub fn simulate_bernoulli(game: &PayoffTensor, s: &[usize], rng: &mut Rng) -> Result<Vec<f64>> {
    let flat = game.shape().flat_index(s)?;
    if !game.is_unit_range() {
        return Err(Error::input("payoff entry outside [0, 1]"));
    }
    Ok((0..game.shape().num_players())
        .map(|k| {
            if rng.gen::<f64>() < game.get_flat(k, flat) {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// Generate a random two-player constant-sum-1 Bernoulli game with `n`
/// strategies per player.
///
/// Diagonal entries (both players on the same strategy) are fixed at 0.5.
/// Off-diagonal entries are rejection-sampled from uniform `[0, 1]` until
/// every one satisfies `|M - 0.5| >= gap`; single-deviation payoff pairs
/// are then redrawn until every deviation margin is at least
/// `deviation_margin_floor(n, gap)` — the full gap whenever that spacing
/// is packable into the admissible band, a scaled-down floor otherwise.
pub fn generate_bernoulli_game(n: usize, gap: f64, rng: &mut Rng) -> Result<PayoffTensor> {
    if n < 2 {
        return Err(Error::input("need at least 2 strategies per player"));
    }
    if !(0.0 < gap && gap < 0.5) {
        return Err(Error::input("gap must lie in (0, 0.5)"));
    }
    let margin = deviation_margin_floor(n, gap);
    // M^1 is an n x n matrix with M^1(i,i) = 0.5 and M^1(j,i) = 1 - M^1(i,j).
    let mut m = vec![vec![0.5; n]; n];
    let draw = |rng: &mut Rng| -> f64 {
        loop {
            let v: f64 = rng.gen();
            if (v - 0.5).abs() >= gap {
                return v;
            }
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let v = draw(rng);
            m[i][j] = v;
            m[j][i] = 1.0 - v;
        }
    }
    const MAX_PASSES: usize = 100_000;
    for _ in 0..MAX_PASSES {
        match first_gap_violation(&m, margin) {
            None => {
                let m2: Vec<Vec<f64>> = m
                    .iter()
                    .map(|row| row.iter().map(|&v| 1.0 - v).collect())
                    .collect();
                return PayoffTensor::from_matrices(m, m2, 1.0);
            }
            Some((i, j)) => {
                // redraw one entry of the violating pair (never a diagonal)
                let v = draw(rng);
                m[i][j] = v;
                m[j][i] = 1.0 - v;
            }
        }
    }
    Err(Error::input(format!(
        "could not satisfy gap {gap} for n = {n} within {MAX_PASSES} redraws"
    )))
}

/// Smallest guaranteed separation between a deviating player's two payoffs
/// in a generated game. The full `gap` is used whenever `n - 1` entries
/// with that pairwise spacing fit comfortably inside the admissible band
/// `[0, 0.5 - gap] ∪ [0.5 + gap, 1]`; for larger games the floor shrinks
/// so rejection sampling stays feasible (packing `n - 1` values with
/// spacing `t` needs `(n - 2) t` of the band's `1 - 2 gap` total length,
/// and every entry is shared between one row and one column constraint;
/// we demand at most a quarter of the band per line).
pub fn deviation_margin_floor(n: usize, gap: f64) -> f64 {
    if n == 2 {
        return gap;
    }
    gap.min((1.0 - 2.0 * gap) / (4.0 * (n - 2) as f64))
}

/// First single-deviation pair whose payoffs nearly tie, reported as an
/// off-diagonal coordinate to redraw.
fn first_gap_violation(m: &[Vec<f64>], tol: f64) -> Option<(usize, usize)> {
    let n = m.len();
    // Player 1 deviations: (i,j) -> (i',j) compares M^1 within column j.
    // Player 2 deviations: (i,j) -> (i,j') compares M^2 = 1 - M^1 within
    // row i, which is the same absolute difference as M^1 within the row.
    for a in 0..n {
        for b in 0..n {
            for c in (b + 1)..n {
                // column a: rows b, c
                if (m[b][a] - m[c][a]).abs() < tol {
                    return Some(off_diagonal(b, a).unwrap_or((c, a)));
                }
                // row a: columns b, c
                if (m[a][b] - m[a][c]).abs() < tol {
                    return Some(off_diagonal(a, b).unwrap_or((a, c)));
                }
            }
        }
    }
    None
}

fn off_diagonal(i: usize, j: usize) -> Option<(usize, usize)> {
    if i == j {
        None
    } else if i < j {
        Some((i, j))
    } else {
        Some((j, i))
    }
}
