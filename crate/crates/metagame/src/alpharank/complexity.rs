//! Sample-complexity calculators for per-profile sampling budgets.

use super::ln_expm1;
use crate::game::GameShape;
use crate::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Inputs to the sample-complexity formulas.
#[derive(Debug, Clone)]
pub struct ComplexityInstance {
    pub shape: GameShape,
    pub m_max: f64,
    pub alpha: f64,
    pub m: u32,
    /// Target sup-norm error on the invariant distribution (finite-alpha
    /// bound).
    pub epsilon: f64,
    /// Failure probability.
    pub delta: f64,
    /// Minimum payoff gap across single-deviation pairs (infinite-alpha
    /// bound).
    pub gap: f64,
}

impl ComplexityInstance {
    fn validate_common(&self) -> Result<()> {
        if !(self.m_max > 0.0) {
            return Err(Error::input("m_max must be positive"));
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::input("delta must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// `ln sum_{n=1}^{S-1} C(S, n) n^S`, evaluated in log space.
fn ln_combinatorial_sum(s: usize) -> f64 {
    let s_f = s as f64;
    let terms: Vec<f64> = (1..s)
        .map(|n| {
            let n_f = n as f64;
            ln_gamma(s_f + 1.0) - ln_gamma(n_f + 1.0) - ln_gamma(s_f - n_f + 1.0)
                + s_f * n_f.ln()
        })
        .collect();
    log_sum_exp(&terms)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Upper end of the admissible target-error range of the finite-alpha
/// bound, additionally capped at 1 (distribution errors cannot exceed 1).
pub fn admissible_epsilon_cap(shape: &GameShape) -> f64 {
    let s = shape.num_profiles();
    let ln_cap = 18f64.ln() - s as f64 * 2f64.ln() + ln_combinatorial_sum(s);
    ln_cap.exp().min(1.0)
}

/// Finite-alpha per-profile sample bound, as a real number (the integer
/// requirement is its ceiling; see [`sample_complexity_finite_alpha`]).
///
/// Evaluates
/// `648 M^2 log(2|S|K/d) L^2 (sum_n C(|S|,n) n^|S|)^2 / (e^2 g^2)`
/// with `L = 2a e^{2aM}` and `g = eta (e^{2aM}-1)/(e^{2amM}-1)`, entirely
/// in log space so large `a*m*M` products cannot overflow.
pub fn finite_alpha_bound(inst: &ComplexityInstance) -> Result<f64> {
    inst.validate_common()?;
    if inst.alpha <= 0.0 {
        return Err(Error::input("alpha must be positive"));
    }
    if inst.m < 2 {
        return Err(Error::input("population size m must be at least 2"));
    }
    let cap = admissible_epsilon_cap(&inst.shape);
    if !(0.0 < inst.epsilon && inst.epsilon < cap) {
        return Err(Error::input(format!(
            "epsilon {} outside the admissible range (0, {cap:.6e})",
            inst.epsilon
        )));
    }
    let s = inst.shape.num_profiles() as f64;
    let k = inst.shape.num_players() as f64;
    let eta = inst.shape.eta();
    let a = inst.alpha;
    let m_max = inst.m_max;
    let ln_l = (2.0 * a).ln() + 2.0 * a * m_max;
    let ln_g = eta.ln() + ln_expm1(2.0 * a * m_max) - ln_expm1(2.0 * a * inst.m as f64 * m_max);
    let ln_sum = ln_combinatorial_sum(inst.shape.num_profiles());
    let ln_log_term = (2.0 * s * k / inst.delta).ln().ln();
    let ln_n = 648f64.ln() + 2.0 * m_max.ln() + ln_log_term + 2.0 * ln_l + 2.0 * ln_sum
        - 2.0 * inst.epsilon.ln()
        - 2.0 * ln_g;
    Ok(ln_n.exp())
}

/// Smallest integer exceeding the finite-alpha bound.
pub fn sample_complexity_finite_alpha(inst: &ComplexityInstance) -> Result<u64> {
    let bound = finite_alpha_bound(inst)?;
    to_count(bound)
}

/// Infinite-alpha per-profile sample bound for exact response-graph (and
/// hence MCC) recovery: smallest integer exceeding
/// `8 gap^-2 M^2 log(2|S|K/delta)`.
pub fn sample_complexity_infinite_alpha(inst: &ComplexityInstance) -> Result<u64> {
    inst.validate_common()?;
    if inst.gap <= 0.0 {
        return Err(Error::input("payoff gap must be positive"));
    }
    let s = inst.shape.num_profiles() as f64;
    let k = inst.shape.num_players() as f64;
    let bound =
        8.0 * inst.gap.powi(-2) * inst.m_max * inst.m_max * (2.0 * s * k / inst.delta).ln();
    to_count(bound)
}

fn to_count(bound: f64) -> Result<u64> {
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return Err(Error::input(format!(
            "sample bound {bound:.3e} does not fit a 64-bit count"
        )));
    }
    Ok(bound.max(0.0).floor() as u64 + 1)
}
