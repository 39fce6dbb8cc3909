//! Ranking and graph comparison metrics.

use crate::alpharank::{RankingDistribution, ResponseGraph};
use crate::game::PayoffTensor;
use crate::{Error, Result};
use std::collections::HashMap;

#[cfg(test)]
mod tests;

/// An ordered partition of item ids into tie buckets, best bucket first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRanking {
    buckets: Vec<Vec<usize>>,
}

impl PartialRanking {
    pub fn new(buckets: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for bucket in &buckets {
            if bucket.is_empty() {
                return Err(Error::input("empty tie bucket"));
            }
            for &item in bucket {
                if !seen.insert(item) {
                    return Err(Error::input(format!("item {item} appears twice")));
                }
            }
        }
        Ok(PartialRanking { buckets })
    }

    pub fn buckets(&self) -> &[Vec<usize>] {
        &self.buckets
    }

    pub fn num_items(&self) -> usize {
        self.buckets.iter().map(|b| b.len()).sum()
    }

    /// bucket position per item
    fn positions(&self) -> HashMap<usize, usize> {
        let mut pos = HashMap::new();
        for (i, bucket) in self.buckets.iter().enumerate() {
            for &item in bucket {
                pos.insert(item, i);
            }
        }
        pos
    }
}

/// Kendall distance between partial rankings with tie penalty `p`
/// (a metric for `p` in `[0.5, 1]`). Per unordered item pair: 0 when both
/// rankings agree (same order, or tied in both), 1 when strictly reversed,
/// `p` when tied in exactly one.
pub fn kendall_partial(r: &PartialRanking, r_hat: &PartialRanking, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("penalty {p} outside [0, 1]")));
    }
    let pos_r = r.positions();
    let pos_h = r_hat.positions();
    if pos_r.len() != pos_h.len() || pos_r.keys().any(|k| !pos_h.contains_key(k)) {
        return Err(Error::input("rankings cover different item sets"));
    }
    let items: Vec<usize> = pos_r.keys().copied().collect();
    let mut total = 0.0;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let a = items[i];
            let b = items[j];
            let c_r = pos_r[&a].cmp(&pos_r[&b]);
            let c_h = pos_h[&a].cmp(&pos_h[&b]);
            use std::cmp::Ordering::Equal;
            total += if c_r == c_h {
                0.0
            } else if c_r == Equal || c_h == Equal {
                p
            } else {
                1.0
            };
        }
    }
    Ok(total)
}

/// Number of single-deviation pairs whose orientation differs between the
/// two graphs (a tie disagrees with any directed orientation).
pub fn edge_errors(estimated: &ResponseGraph, truth: &ResponseGraph) -> Result<usize> {
    if estimated.shape() != truth.shape() {
        return Err(Error::input("response graphs have different shapes"));
    }
    let mut errors = 0;
    for t in truth.edges() {
        let e = estimated
            .edge_between(t.from, t.to)
            .ok_or_else(|| Error::input("estimated graph is missing a deviation pair"))?;
        let t_tie = t.kind == crate::alpharank::EdgeKind::Tie;
        let e_tie = e.kind == crate::alpharank::EdgeKind::Tie;
        let disagree = match (t_tie, e_tie) {
            (true, true) => false,
            (false, false) => e.from != t.from,
            _ => true,
        };
        if disagree {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Buckets a ranking distribution into a partial ranking: descending mass,
/// with masses within `tie_tol` of the bucket representative merged.
pub fn ranking_from_distribution(dist: &RankingDistribution, tie_tol: f64) -> PartialRanking {
    let mut order: Vec<usize> = (0..dist.pi.len()).collect();
    order.sort_by(|&a, &b| dist.pi[b].partial_cmp(&dist.pi[a]).unwrap().then(a.cmp(&b)));
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    let mut rep = f64::INFINITY;
    for s in order {
        if buckets.is_empty() || rep - dist.pi[s] > tie_tol {
            buckets.push(vec![s]);
            rep = dist.pi[s];
        } else {
            buckets.last_mut().unwrap().push(s);
        }
    }
    PartialRanking { buckets }
}

/// Absolute deviating-player payoff difference for every single-deviation
/// pair: the ground-truth gap distribution.
pub fn gap_distribution(game: &PayoffTensor) -> Vec<f64> {
    let shape = game.shape();
    let mut out = Vec::new();
    for flat in 0..shape.num_profiles() {
        for (k, nb) in shape.neighbors(flat) {
            if nb > flat {
                out.push((game.get_flat(k, flat) - game.get_flat(k, nb)).abs());
            }
        }
    }
    out
}
