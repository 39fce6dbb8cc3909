//! Normal-form meta-game representation.
//!
//! Payoffs are stored as dense row-major tensors keyed by a mixed-radix
//! profile index: for strategy counts `(n_1, ..., n_K)` the profile
//! `(s^1, ..., s^K)` maps to the flat index
//! `s^1 * n_2 * ... * n_K + ... + s^{K-1} * n_K + s^K`
//! (last player's coordinate varies fastest).

mod io;
mod simulate;

pub use io::{load_table_csv, load_table_json, save_table_csv, save_table_json, TableFormat};
pub use simulate::{
    deviation_margin_floor, generate_bernoulli_game, simulate_bernoulli, BernoulliSimulator,
    OutcomeSimulator,
};

use crate::{Error, Result};
use itertools::Itertools;

/// Number of players and per-player strategy counts of a game.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GameShape {
    counts: Vec<usize>,
}

impl GameShape {
    pub fn new(strategy_counts: Vec<usize>) -> Result<Self> {
        if strategy_counts.is_empty() {
            return Err(Error::input("a game needs at least one player"));
        }
        if strategy_counts.iter().any(|&n| n == 0) {
            return Err(Error::input("every player needs at least one strategy"));
        }
        let mut total: usize = 1;
        for &n in &strategy_counts {
            total = total
                .checked_mul(n)
                .ok_or_else(|| Error::input("profile count overflows usize"))?;
        }
        Ok(GameShape {
            counts: strategy_counts,
        })
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of pure strategy profiles, `|S|`.
    pub fn num_profiles(&self) -> usize {
        self.counts.iter().product()
    }

    /// Number of single-deviation neighbors of any profile,
    /// `sum_k (|S^k| - 1)`; its reciprocal is the transition normalizer.
    pub fn num_deviations(&self) -> usize {
        self.counts.iter().map(|&n| n - 1).sum()
    }

    /// The normalizer `eta = 1 / sum_k (|S^k| - 1)`.
    pub fn eta(&self) -> f64 {
        1.0 / self.num_deviations() as f64
    }

    pub fn is_valid_profile(&self, profile: &[usize]) -> bool {
        profile.len() == self.counts.len()
            && profile.iter().zip(&self.counts).all(|(&s, &n)| s < n)
    }

    /// Mixed-radix flat index of a profile.
    pub fn flat_index(&self, profile: &[usize]) -> Result<usize> {
        if !self.is_valid_profile(profile) {
            return Err(Error::input(format!(
                "profile {profile:?} is invalid for shape {:?}",
                self.counts
            )));
        }
        Ok(self.flat_index_unchecked(profile))
    }

    pub(crate) fn flat_index_unchecked(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (&s, &n) in profile.iter().zip(&self.counts) {
            idx = idx * n + s;
        }
        idx
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn profile(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        for (slot, &n) in out.iter_mut().rev().zip(self.counts.iter().rev()) {
            *slot = flat % n;
            flat /= n;
        }
        out
    }

    /// All profiles in flat-index order.
    pub fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_profiles()).map(|i| self.profile(i))
    }

    /// All profiles differing from `flat` in exactly one player's strategy,
    /// as `(deviating player, neighbor flat index)` pairs.
    pub fn neighbors(&self, flat: usize) -> Vec<(usize, usize)> {
        let profile = self.profile(flat);
        let mut out = Vec::with_capacity(self.num_deviations());
        // stride of player k in the flat index
        let mut stride = vec![1usize; self.counts.len()];
        for k in (0..self.counts.len().saturating_sub(1)).rev() {
            stride[k] = stride[k + 1] * self.counts[k + 1];
        }
        for (k, &n) in self.counts.iter().enumerate() {
            for alt in 0..n {
                if alt != profile[k] {
                    let offset = (alt as isize - profile[k] as isize) * stride[k] as isize;
                    out.push((k, (flat as isize + offset) as usize));
                }
            }
        }
        out
    }
}

/// All profiles differing from `s` in exactly one player's strategy, with
/// the deviating player's index.
pub fn profile_neighbors(shape: &GameShape, s: &[usize]) -> Result<Vec<(usize, Vec<usize>)>> {
    let flat = shape.flat_index(s)?;
    Ok(shape
        .neighbors(flat)
        .into_iter()
        .map(|(k, f)| (k, shape.profile(f)))
        .collect())
}

/// Per-player expected payoff tables over all strategy profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTensor {
    shape: GameShape,
    /// One flat tensor per player, indexed by the mixed-radix profile index.
    payoffs: Vec<Vec<f64>>,
    m_max: f64,
}

impl PayoffTensor {
    pub fn new(shape: GameShape, payoffs: Vec<Vec<f64>>, m_max: f64) -> Result<Self> {
        if m_max <= 0.0 || !m_max.is_finite() {
            return Err(Error::input("m_max must be positive and finite"));
        }
        if payoffs.len() != shape.num_players() {
            return Err(Error::input(format!(
                "expected {} per-player tensors, got {}",
                shape.num_players(),
                payoffs.len()
            )));
        }
        let total = shape.num_profiles();
        for (k, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != total {
                return Err(Error::input(format!(
                    "player {k} tensor has {} entries, expected {total}",
                    tensor.len()
                )));
            }
            for &v in tensor {
                if !v.is_finite() || v.abs() > m_max {
                    return Err(Error::input(format!(
                        "player {k} payoff {v} outside [-{m_max}, {m_max}]"
                    )));
                }
            }
        }
        Ok(PayoffTensor {
            shape,
            payoffs,
            m_max,
        })
    }

    /// Two-player helper: build from row-major matrices `m1[i][j]`, `m2[i][j]`.
    pub fn from_matrices(m1: Vec<Vec<f64>>, m2: Vec<Vec<f64>>, m_max: f64) -> Result<Self> {
        let rows = m1.len();
        let cols = m1.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::input("empty payoff matrix"));
        }
        if m2.len() != rows || m2.iter().any(|r| r.len() != cols) {
            return Err(Error::input("player matrices must share one shape"));
        }
        if m1.iter().any(|r| r.len() != cols) {
            return Err(Error::input("ragged payoff matrix"));
        }
        let shape = GameShape::new(vec![rows, cols])?;
        let flat1 = m1.into_iter().flatten().collect();
        let flat2 = m2.into_iter().flatten().collect();
        PayoffTensor::new(shape, vec![flat1, flat2], m_max)
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn m_max(&self) -> f64 {
        self.m_max
    }

    /// Payoff of player `k` at the flat profile index.
    pub fn get_flat(&self, k: usize, flat: usize) -> f64 {
        self.payoffs[k][flat]
    }

    pub fn get(&self, k: usize, profile: &[usize]) -> Result<f64> {
        Ok(self.payoffs[k][self.shape.flat_index(profile)?])
    }

    pub fn set_flat(&mut self, k: usize, flat: usize, value: f64) {
        self.payoffs[k][flat] = value;
    }

    pub fn player_tensor(&self, k: usize) -> &[f64] {
        &self.payoffs[k]
    }

    /// Minimum and maximum payoff entry over all players and profiles.
    pub fn payoff_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for tensor in &self.payoffs {
            for &v in tensor {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// True iff all entries lie in `[0, 1]`.
    pub fn is_unit_range(&self) -> bool {
        let (lo, hi) = self.payoff_range();
        lo >= 0.0 && hi <= 1.0
    }
}

/// Empirical payoff estimates together with per-profile sample counts.
///
/// A profile with count 0 has an undefined mean; reading it is a caller
/// error guarded by [`EmpiricalPayoffs::mean`].
#[derive(Debug, Clone)]
pub struct EmpiricalPayoffs {
    shape: GameShape,
    sums: Vec<Vec<f64>>,
    counts: Vec<u64>,
}

impl EmpiricalPayoffs {
    pub fn new(shape: GameShape) -> Self {
        let total = shape.num_profiles();
        let players = shape.num_players();
        EmpiricalPayoffs {
            shape,
            sums: vec![vec![0.0; total]; players],
            counts: vec![0; total],
        }
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn record(&mut self, flat: usize, outcome: &[f64]) {
        for (k, &v) in outcome.iter().enumerate() {
            self.sums[k][flat] += v;
        }
        self.counts[flat] += 1;
    }

    pub fn count(&self, flat: usize) -> u64 {
        self.counts[flat]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Empirical mean payoff of player `k` at the profile, `None` when the
    /// profile has never been sampled.
    pub fn mean(&self, k: usize, flat: usize) -> Option<f64> {
        if self.counts[flat] == 0 {
            None
        } else {
            Some(self.sums[k][flat] / self.counts[flat] as f64)
        }
    }

    /// Snapshot of the means as a [`PayoffTensor`], with unsampled entries
    /// filled with `fill`.
    pub fn to_tensor(&self, m_max: f64, fill: f64) -> Result<PayoffTensor> {
        let payoffs = (0..self.shape.num_players())
            .map(|k| {
                (0..self.shape.num_profiles())
                    .map(|f| self.mean(k, f).unwrap_or(fill))
                    .collect()
            })
            .collect();
        PayoffTensor::new(self.shape.clone(), payoffs, m_max)
    }
}

/// Whether the game is invariant under every simultaneous relabeling of
/// players: `M^k(s^1,...,s^K) = M^{rho(k)}(s^{rho(1)},...,s^{rho(K)})` for
/// all permutations `rho`, within tolerance `1e-12`.
///
/// Games whose players have heterogeneous strategy counts are not symmetric.
pub fn is_symmetric(game: &PayoffTensor) -> bool {
    let shape = game.shape();
    let counts = shape.strategy_counts();
    if counts.iter().any(|&n| n != counts[0]) {
        return false;
    }
    let k_players = shape.num_players();
    const TOL: f64 = 1e-12;
    for perm in (0..k_players).permutations(k_players) {
        for flat in 0..shape.num_profiles() {
            let s = shape.profile(flat);
            // permuted profile: coordinate i holds s^{perm(i)}
            let permuted: Vec<usize> = (0..k_players).map(|i| s[perm[i]]).collect();
            let pf = shape.flat_index_unchecked(&permuted);
            for k in 0..k_players {
                if (game.get_flat(k, flat) - game.get_flat(perm[k], pf)).abs() > TOL {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
pub(crate) mod tests;
