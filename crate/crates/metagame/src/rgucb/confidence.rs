//! Confidence allocation, interval construction, and stopping criteria.

use crate::game::GameShape;
use crate::{Error, Result};
use statrs::distribution::{Beta, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum IntervalMethod {
    Hoeffding,
    ClopperPearson,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub method: IntervalMethod,
    /// Per-check failure probability f.
    pub level: f64,
}

/// Per-check failure probability for a comparison at time index `t`
/// (`t` = total samples of the problem's two profiles):
/// f = 6 delta / (pi^2 |S| sum_k(|S^k|-1) t^3). Summed over all checks and
/// problems this union-bounds the total failure probability by delta.
pub fn allocate_confidence(delta: f64, shape: &GameShape, t: u64) -> f64 {
    debug_assert!(t >= 1);
    let problems_x2 = (shape.num_profiles() * shape.num_deviations()) as f64;
    6.0 * delta / (std::f64::consts::PI.powi(2) * problems_x2 * (t as f64).powi(3))
}

/// Two-sided interval for an empirical mean of `n` outcomes in
/// `outcome_range`, at failure probability `f`.
pub fn confidence_interval(
    method: IntervalMethod,
    mean: f64,
    n: u64,
    f: f64,
    outcome_range: (f64, f64),
) -> Result<ConfidenceInterval> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::input(format!("confidence level f = {f} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::input("confidence interval requires n >= 1"));
    }
    let (a, b) = outcome_range;
    let (lower, upper) = match method {
        IntervalMethod::Hoeffding => {
            let half = ((b - a).powi(2) * (2.0 / f).ln() / (2.0 * n as f64)).sqrt();
            (mean - half, mean + half)
        }
        IntervalMethod::ClopperPearson => {
            // Work on the mean rescaled to [0, 1]; map bounds back.
            let width = b - a;
            if width <= 0.0 {
                return Err(Error::input("Clopper-Pearson needs a nondegenerate range"));
            }
            let x = ((mean - a) / width).clamp(0.0, 1.0);
            let nf = n as f64;
            let nx = nf * x;
            let lo = if nx <= 0.0 {
                0.0
            } else if nx >= nf {
                // Beta(n, 1) quantile in closed form.
                (f / 2.0).powf(1.0 / nf)
            } else {
                Beta::new(nx, nf - nx + 1.0)
                    .map_err(|e| Error::input(e.to_string()))?
                    .inverse_cdf(f / 2.0)
            };
            let hi = if nx >= nf {
                1.0
            } else if nx <= 0.0 {
                // Beta(1, n) quantile in closed form.
                1.0 - (f / 2.0).powf(1.0 / nf)
            } else {
                Beta::new(nx + 1.0, nf - nx)
                    .map_err(|e| Error::input(e.to_string()))?
                    .inverse_cdf(1.0 - f / 2.0)
            };
            (a + lo * width, a + hi * width)
        }
    };
    Ok(ConfidenceInterval { lower, upper, method, level: f })
}

/// Stopping rule: which interval to build and how much overlap (if any)
/// still counts as resolved.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StoppingCriterion {
    pub method: IntervalMethod,
    /// `None` requires disjoint intervals; `Some(eps)` tolerates an
    /// intersection shorter than `eps` (in outcome units).
    pub epsilon_relax: Option<f64>,
}

impl StoppingCriterion {
    pub fn strict(method: IntervalMethod) -> Self {
        StoppingCriterion { method, epsilon_relax: None }
    }

    /// Relaxed variant; the conventional default tolerance is 0.05 of the
    /// outcome range.
    pub fn relaxed(method: IntervalMethod, epsilon_relax: f64) -> Self {
        StoppingCriterion { method, epsilon_relax: Some(epsilon_relax) }
    }
}

/// Direction of a resolved comparison, by empirical means at resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    /// Profile `a`'s mean was higher.
    AOverB,
    /// Profile `b`'s mean was higher (also used on an exact mean tie).
    BOverA,
}

/// Checks whether the pair of intervals resolves the comparison. Returns
/// the direction of the better profile when it does.
pub fn is_resolved(
    criterion: &StoppingCriterion,
    ci_a: &ConfidenceInterval,
    ci_b: &ConfidenceInterval,
    mean_a: f64,
    mean_b: f64,
) -> Option<Direction> {
    let overlap = ci_a.upper.min(ci_b.upper) - ci_a.lower.max(ci_b.lower);
    let ok = match criterion.epsilon_relax {
        None => overlap < 0.0,
        Some(eps) => overlap < eps,
    };
    if !ok {
        return None;
    }
    Some(if mean_a > mean_b { Direction::AOverB } else { Direction::BOverA })
}
