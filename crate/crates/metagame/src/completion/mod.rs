//! Low-rank completion of partially observed two-player win-loss payoff
//! matrices by alternating least squares, over a choice of payoff, logit,
//! or odds transforms, followed by ranking of the completed game.

use crate::alpharank::{alpharank, AlphaRankParams, RankingDistribution};
use crate::game::PayoffTensor;
use crate::metrics::{kendall_partial, ranking_from_distribution};
use crate::rng::Rng;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};


/// Representation the completion operates in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Transform {
    /// Raw payoffs.
    Payoff,
    /// `L = ln(M / (1 - M))`.
    Logit,
    /// `O = M / (1 - M)`.
    Odds,
}

const PAYOFF_CLIP: f64 = 1e-6;
const ODDS_FLOOR: f64 = 1e-9;

impl Transform {
    pub fn forward(&self, m: f64) -> f64 {
        match self {
            Transform::Payoff => m,
            Transform::Logit => (m / (1.0 - m)).ln(),
            Transform::Odds => m / (1.0 - m),
        }
    }

    /// Inverse, with payoffs clipped into `[1e-6, 1 - 1e-6]` (odds are
    /// additionally floored at `1e-9` before inversion).
    pub fn inverse(&self, v: f64) -> f64 {
        let m = match self {
            Transform::Payoff => v,
            Transform::Logit => 1.0 / (1.0 + (-v).exp()),
            Transform::Odds => {
                let o = v.max(ODDS_FLOOR);
                o / (1.0 + o)
            }
        };
        m.clamp(PAYOFF_CLIP, 1.0 - PAYOFF_CLIP)
    }
}

/// A partially observed real matrix in some transform domain.
#[derive(Debug, Clone)]
pub struct MaskedMatrix {
    values: DMatrix<f64>,
    mask: DMatrix<bool>,
    transform: Transform,
}

impl MaskedMatrix {
    /// `values` holds raw payoffs; observed entries are transformed on
    /// construction. Logit/odds transforms require observed payoffs
    /// strictly inside `(0, 1)`.
    pub fn from_payoffs(
        payoffs: &DMatrix<f64>,
        mask: DMatrix<bool>,
        transform: Transform,
    ) -> Result<Self> {
        if payoffs.shape() != mask.shape() {
            return Err(Error::input("mask shape must match the value shape"));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::input("empty observation mask"));
        }
        let mut values = DMatrix::zeros(payoffs.nrows(), payoffs.ncols());
        for i in 0..payoffs.nrows() {
            for j in 0..payoffs.ncols() {
                if !mask[(i, j)] {
                    continue;
                }
                let m = payoffs[(i, j)];
                if transform != Transform::Payoff && !(m > 0.0 && m < 1.0) {
                    return Err(Error::input(format!(
                        "observed payoff {m} at ({i}, {j}) outside (0, 1) for {transform:?}"
                    )));
                }
                values[(i, j)] = transform.forward(m);
            }
        }
        Ok(MaskedMatrix { values, mask, transform })
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct CompletionFit {
    /// `A * B^T` over the whole matrix, in the transform domain.
    pub completed: DMatrix<f64>,
    /// Masked squared error after each alternation sweep.
    pub objectives: Vec<f64>,
    /// Some row or column had fewer observations than the rank.
    pub underdetermined: bool,
}

fn masked_error(masked: &MaskedMatrix, completed: &DMatrix<f64>) -> f64 {
    let mut err = 0.0;
    for i in 0..masked.nrows() {
        for j in 0..masked.ncols() {
            if masked.mask[(i, j)] {
                err += (completed[(i, j)] - masked.values[(i, j)]).powi(2);
            }
        }
    }
    err
}

/// Rank-`r` alternating least squares on the observed entries. Each sweep
/// resolves one factor in closed form (ridge 1e-10 guards rank-deficient
/// normal equations), so the masked objective never increases.
pub fn alternating_minimization(
    masked: &MaskedMatrix,
    rank: usize,
    iters: usize,
    rng: &mut Rng,
) -> Result<CompletionFit> {
    let (n, m) = (masked.nrows(), masked.ncols());
    if rank == 0 || rank > n.min(m) {
        return Err(Error::input(format!("rank {rank} out of range for a {n}x{m} matrix")));
    }
    let row_counts: Vec<usize> =
        (0..n).map(|i| (0..m).filter(|&j| masked.mask[(i, j)]).count()).collect();
    let col_counts: Vec<usize> =
        (0..m).map(|j| (0..n).filter(|&i| masked.mask[(i, j)]).count()).collect();
    let underdetermined =
        row_counts.iter().any(|&c| c < rank) || col_counts.iter().any(|&c| c < rank);

    // Spectral initialization: truncated SVD of the mean-imputed matrix
    // plus a small random perturbation. A pure random start frequently
    // lands in spurious stationary points of the masked objective; the
    // spectral start is the standard remedy.
    let observed_mean = {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..m {
                if masked.mask[(i, j)] {
                    sum += masked.values[(i, j)];
                    count += 1;
                }
            }
        }
        sum / count as f64
    };
    let imputed = DMatrix::from_fn(n, m, |i, j| {
        if masked.mask[(i, j)] {
            masked.values[(i, j)]
        } else {
            observed_mean
        }
    });
    let svd = imputed.svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let jitter = 1e-3;
    let mut a = DMatrix::from_fn(n, rank, |i, d| {
        let z: f64 = StandardNormal.sample(rng);
        u[(i, d)] * svd.singular_values[d].sqrt() + z * jitter
    });
    let mut b = DMatrix::from_fn(m, rank, |j, d| {
        let z: f64 = StandardNormal.sample(rng);
        vt[(d, j)] * svd.singular_values[d].sqrt() + z * jitter
    });

    const RIDGE: f64 = 1e-10;
    let mut objectives = Vec::with_capacity(iters);
    for _ in 0..iters {
        // rows of A given B
        for i in 0..n {
            let mut gram = DMatrix::<f64>::zeros(rank, rank);
            let mut rhs = DVector::<f64>::zeros(rank);
            for j in 0..m {
                if !masked.mask[(i, j)] {
                    continue;
                }
                let bj = b.row(j).transpose();
                gram += &bj * bj.transpose();
                rhs += masked.values[(i, j)] * bj;
            }
            for d in 0..rank {
                gram[(d, d)] += RIDGE;
            }
            if let Some(sol) = gram.lu().solve(&rhs) {
                a.set_row(i, &sol.transpose());
            }
        }
        // rows of B given A
        for j in 0..m {
            let mut gram = DMatrix::<f64>::zeros(rank, rank);
            let mut rhs = DVector::<f64>::zeros(rank);
            for i in 0..n {
                if !masked.mask[(i, j)] {
                    continue;
                }
                let ai = a.row(i).transpose();
                gram += &ai * ai.transpose();
                rhs += masked.values[(i, j)] * ai;
            }
            for d in 0..rank {
                gram[(d, d)] += RIDGE;
            }
            if let Some(sol) = gram.lu().solve(&rhs) {
                b.set_row(j, &sol.transpose());
            }
        }
        objectives.push(masked_error(masked, &(&a * b.transpose())));
    }
    Ok(CompletionFit { completed: &a * b.transpose(), objectives, underdetermined })
}

#[derive(Debug, Clone)]
pub struct CompleteAndRank {
    /// Completed payoff matrix (transform inverted, clipped into (0, 1)).
    pub payoffs: DMatrix<f64>,
    pub ranking: RankingDistribution,
    /// Kendall partial distance to the truth's ranking, when supplied.
    pub kendall_error: Option<f64>,
    pub underdetermined: bool,
}

/// Completes a masked win-loss matrix in the requested transform domain,
/// inverts the transform, and ranks the completed constant-sum game.
#[allow(clippy::too_many_arguments)]
pub fn complete_and_rank(
    payoffs: &DMatrix<f64>,
    mask: DMatrix<bool>,
    transform: Transform,
    rank: usize,
    iters: usize,
    params: &AlphaRankParams,
    truth: Option<&DMatrix<f64>>,
    rng: &mut Rng,
) -> Result<CompleteAndRank> {
    let masked = MaskedMatrix::from_payoffs(payoffs, mask, transform)?;
    let fit = alternating_minimization(&masked, rank, iters, rng)?;
    let mut completed = fit.completed.clone();
    for v in completed.iter_mut() {
        *v = transform.inverse(*v);
    }
    let ranking = rank_win_matrix(&completed, params)?;
    let kendall_error = match truth {
        Some(t) => {
            let truth_ranking = rank_win_matrix(t, params)?;
            Some(kendall_partial(
                &ranking_from_distribution(&ranking, 1e-8),
                &ranking_from_distribution(&truth_ranking, 1e-8),
                0.5,
            )?)
        }
        None => None,
    };
    Ok(CompleteAndRank {
        payoffs: completed,
        ranking,
        kendall_error,
        underdetermined: fit.underdetermined,
    })
}

/// Ranks a win-loss matrix as the constant-sum game it induces.
pub fn rank_win_matrix(m1: &DMatrix<f64>, params: &AlphaRankParams) -> Result<RankingDistribution> {
    let n = m1.nrows();
    if m1.ncols() != n {
        return Err(Error::input("win matrix must be square"));
    }
    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
    };
    let m2 = DMatrix::from_fn(n, n, |i, j| 1.0 - m1[(i, j)]);
    let game = PayoffTensor::from_matrices(rows(m1), rows(&m2), 1.0)?;
    alpharank(&game, params, 1e-12)
}
