//! Batch Elo: maximum-likelihood logistic ratings fitted to a batch of
//! two-player win/loss outcomes, plus the pairwise sample-complexity
//! calculator for epsilon-accurate fitted payoffs.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[cfg(test)]
mod tests;

/// Default ridge weight: keeps the minimizer finite on degenerate
/// (all-win) data while perturbing regular fits negligibly.
pub const DEFAULT_REG: f64 = 1e-9;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// A batch of pairwise outcomes over `n` strategies, aggregated per
/// ordered pair: `sums[a][b]` is the total payoff strategy `a` collected
/// against `b` over `counts[a][b]` games (payoffs in `[0, 1]`).
#[derive(Debug, Clone)]
pub struct OutcomeBatch {
    n: usize,
    sums: Vec<Vec<f64>>,
    counts: Vec<Vec<u64>>,
}

impl OutcomeBatch {
    pub fn new(n: usize) -> Self {
        OutcomeBatch { n, sums: vec![vec![0.0; n]; n], counts: vec![vec![0; n]; n] }
    }

    pub fn num_strategies(&self) -> usize {
        self.n
    }

    pub fn add_outcome(&mut self, a: usize, b: usize, payoff: f64) -> Result<()> {
        if a >= self.n || b >= self.n || a == b {
            return Err(Error::input(format!("bad strategy pair ({a}, {b})")));
        }
        if !(0.0..=1.0).contains(&payoff) {
            return Err(Error::input(format!("payoff {payoff} outside [0, 1]")));
        }
        self.sums[a][b] += payoff;
        self.counts[a][b] += 1;
        Ok(())
    }

    /// Builds a batch from a win-rate matrix with a uniform per-ordered-pair
    /// count (diagonal ignored).
    pub fn from_win_matrix(rates: &[Vec<f64>], count_per_pair: u64) -> Result<Self> {
        let n = rates.len();
        let mut batch = OutcomeBatch::new(n);
        for (a, row) in rates.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input("win-rate matrix must be square"));
            }
            for (b, &p) in row.iter().enumerate() {
                if a == b {
                    continue;
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::input(format!("win rate {p} outside [0, 1]")));
                }
                batch.sums[a][b] = p * count_per_pair as f64;
                batch.counts[a][b] = count_per_pair;
            }
        }
        Ok(batch)
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a][b]
    }

    /// Unordered strategy pairs with no outcome in either direction.
    pub fn uncovered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.counts[a][b] == 0 && self.counts[b][a] == 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn strategy_covered(&self, s: usize) -> bool {
        (0..self.n).any(|t| self.counts[s][t] > 0 || self.counts[t][s] > 0)
    }
}

/// Fitted ratings; mean-centered (the objective depends only on rating
/// differences, so the gauge is fixed by centering).
#[derive(Debug, Clone)]
pub struct EloRatings {
    ratings: Vec<f64>,
    reg: f64,
}

impl EloRatings {
    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "strategies": (0..self.ratings.len()).map(|i| format!("s{i}")).collect::<Vec<_>>(),
            "ratings": self.ratings,
            "reg": self.reg,
        })
    }
}

/// Cross-entropy objective plus the ridge term.
fn objective(batch: &OutcomeBatch, r: &DVector<f64>, reg: f64) -> f64 {
    let mut total = reg * r.dot(r);
    for a in 0..batch.n {
        for b in 0..batch.n {
            let n_ab = batch.counts[a][b];
            if n_ab == 0 {
                continue;
            }
            let q = sigmoid(r[a] - r[b]);
            let u = batch.sums[a][b];
            // -u ln q - (n - u) ln(1 - q), summed over the n_ab outcomes
            total -= u * q.ln() + (n_ab as f64 - u) * (1.0 - q).ln();
        }
    }
    total
}

/// Fits ratings by Newton descent on the convex objective, to gradient
/// infinity-norm below 1e-8.
pub fn batch_elo_fit(batch: &OutcomeBatch, reg: f64) -> Result<EloRatings> {
    let n = batch.n;
    if n == 0 {
        return Err(Error::input("empty strategy set"));
    }
    if reg < 0.0 {
        return Err(Error::input("regularization weight must be nonnegative"));
    }
    for s in 0..n {
        if !batch.strategy_covered(s) {
            return Err(Error::input(format!("strategy {s} appears in no outcome")));
        }
    }

    let mut r = DVector::<f64>::zeros(n);
    let mut obj = objective(batch, &r, reg);
    const GRAD_TOL: f64 = 1e-8;
    const MAX_ITERS: usize = 200;
    for _ in 0..MAX_ITERS {
        let mut grad = DVector::<f64>::zeros(n);
        let mut hess = DMatrix::<f64>::zeros(n, n);
        for a in 0..n {
            grad[a] += 2.0 * reg * r[a];
            hess[(a, a)] += 2.0 * reg;
        }
        for a in 0..n {
            for b in 0..n {
                let n_ab = batch.counts[a][b] as f64;
                if n_ab == 0.0 {
                    continue;
                }
                let q = sigmoid(r[a] - r[b]);
                let g = n_ab * q - batch.sums[a][b];
                grad[a] += g;
                grad[b] -= g;
                let w = n_ab * q * (1.0 - q);
                hess[(a, a)] += w;
                hess[(b, b)] += w;
                hess[(a, b)] -= w;
                hess[(b, a)] -= w;
            }
        }
        if grad.amax() < GRAD_TOL {
            let mean = r.mean();
            return Ok(EloRatings { ratings: r.iter().map(|v| v - mean).collect(), reg });
        }
        // tiny ridge pins the all-ones gauge direction when reg = 0
        for a in 0..n {
            hess[(a, a)] += 1e-12;
        }
        let step = hess
            .clone()
            .lu()
            .solve(&grad)
            .ok_or_else(|| Error::contract("singular Hessian in Elo fit"))?;
        // backtracking keeps the Newton step inside the convex bowl
        let mut scale = 1.0;
        loop {
            let candidate = &r - scale * &step;
            let new_obj = objective(batch, &candidate, reg);
            if new_obj <= obj + 1e-15 || scale < 1e-8 {
                r = candidate;
                obj = new_obj;
                break;
            }
            scale *= 0.5;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERS, residual: f64::NAN })
}

/// Predicted probability of `a` beating `b`: `sigma(r_a - r_b)`.
pub fn elo_predict(ratings: &EloRatings, a: usize, b: usize) -> Result<f64> {
    let n = ratings.ratings.len();
    if a >= n || b >= n {
        return Err(Error::input(format!("unrated strategy in pair ({a}, {b})")));
    }
    Ok(sigmoid(ratings.ratings[a] - ratings.ratings[b]))
}

/// Smallest per-pair sample count guaranteeing epsilon-accurate fitted
/// payoffs with probability 1 - delta:
/// N > |S^1|^2 eps^-2 log(|S^1|^2 / delta) / 2.
pub fn elo_sample_complexity(n_strategies: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input("epsilon and delta must lie in (0, 1)"));
    }
    if n_strategies == 0 {
        return Err(Error::input("need at least one strategy"));
    }
    let s = n_strategies as f64;
    let bound = 0.5 * s * s * epsilon.powi(-2) * (s * s / delta).ln();
    Ok(bound.floor() as u64 + 1)
}
