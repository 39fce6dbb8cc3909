//! Profile-selection schemes for the adaptive sampler.

use crate::rng::Rng;
use rand::Rng as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SamplingScheme {
    /// Uniform over all profiles involved in an unresolved comparison.
    Uniform,
    /// Commit to one unresolved pair and alternate its two profiles
    /// (lower flat index first) until that pair resolves.
    UniformExhaustive,
    /// Profile drawn with probability proportional to the square of its
    /// valence (number of incident unresolved comparisons).
    ValenceWeighted,
    /// Deterministic: lowest sample count among active profiles, ties
    /// broken by lowest flat index.
    CountWeighted,
}

/// Mutable bookkeeping the UE scheme needs between steps.
#[derive(Debug, Default, Clone)]
pub struct SchemeState {
    /// Index (into the problem list) of the pair UE is committed to, and
    /// whether the lower-flat-index profile goes next.
    pub ue_commitment: Option<(usize, bool)>,
}

/// A view of the sampler the schemes select from. `active[i]` are the flat
/// indices of sampleable profiles (deduplicated, ascending), `valence[i]`
/// their unresolved-incidence counts and `count[i]` their sample counts.
pub struct SelectionView<'a> {
    pub active: &'a [usize],
    pub valence: &'a [u64],
    pub counts: &'a [u64],
}

pub(super) fn select_uniform(view: &SelectionView, rng: &mut Rng) -> usize {
    view.active[rng.gen_range(0..view.active.len())]
}

pub(super) fn select_valence_weighted(view: &SelectionView, rng: &mut Rng) -> usize {
    let weights: Vec<f64> = view
        .active
        .iter()
        .zip(view.valence)
        .map(|(_, &v)| (v * v) as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return view.active[i];
        }
        u -= w;
    }
    *view.active.last().unwrap()
}

pub(super) fn select_count_weighted(view: &SelectionView) -> usize {
    let mut best = view.active[0];
    let mut best_count = view.counts[0];
    for (&p, &c) in view.active.iter().zip(view.counts).skip(1) {
        if c < best_count {
            best = p;
            best_count = c;
        }
    }
    best
}
