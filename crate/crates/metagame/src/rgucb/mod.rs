//! ResponseGraphUCB: adaptive resolution of every single-deviation payoff
//! comparison as a collection of pure-exploration two-arm bandit problems.
//!
//! The sampler repeatedly picks a strategy profile (per a pluggable
//! scheme), draws one noisy outcome, and closes a comparison once the two
//! profiles' confidence intervals separate. The final response graph
//! orients each pair by empirical means; pairs still open when the budget
//! runs out are flagged rather than failed.

mod confidence;
mod schemes;

pub use confidence::{
    allocate_confidence, confidence_interval, is_resolved, ConfidenceInterval, Direction,
    IntervalMethod, StoppingCriterion,
};
pub use schemes::{SamplingScheme, SchemeState, SelectionView};

use crate::alpharank::{EdgeKind, ResponseEdge, ResponseGraph};
use crate::game::{EmpiricalPayoffs, GameShape, OutcomeSimulator};
use crate::rng::Rng;
use crate::{Error, Result};
use rand::Rng as _;

/// One single-deviation comparison: `profile_a < profile_b` are flat
/// indices differing only in `player`'s coordinate.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComparisonProblem {
    pub player: usize,
    pub profile_a: usize,
    pub profile_b: usize,
    pub status: ProblemStatus,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum ProblemStatus {
    Unresolved,
    Resolved {
        direction: Direction,
        step: u64,
        ci_a: ConfidenceInterval,
        ci_b: ConfidenceInterval,
    },
}

impl ComparisonProblem {
    pub fn is_resolved(&self) -> bool {
        !matches!(self.status, ProblemStatus::Unresolved)
    }
}

/// One problem per unordered single-deviation pair per deviating player:
/// |S| * sum_k(|S^k|-1) / 2 problems in total.
pub fn build_comparison_list(shape: &GameShape) -> Vec<ComparisonProblem> {
    let mut problems = Vec::new();
    for flat in 0..shape.num_profiles() {
        for (player, nb) in shape.neighbors(flat) {
            if nb > flat {
                problems.push(ComparisonProblem {
                    player,
                    profile_a: flat,
                    profile_b: nb,
                    status: ProblemStatus::Unresolved,
                });
            }
        }
    }
    problems
}

/// One sampling step, for replay and audit.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HistoryRecord {
    pub step: u64,
    pub profile: Vec<usize>,
    pub outcome: Vec<f64>,
    /// Problem indices closed by this step.
    pub resolved: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RgucbResult {
    pub empirical: EmpiricalPayoffs,
    pub graph: ResponseGraph,
    pub problems: Vec<ComparisonProblem>,
    pub history: Vec<HistoryRecord>,
    /// True when the budget ran out with comparisons still open.
    pub truncated: bool,
    pub total_samples: u64,
}

impl RgucbResult {
    /// JSON-lines history: one record per sample.
    pub fn history_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in &self.history {
            out.push_str(&serde_json::to_string(rec).expect("history serializes"));
            out.push('\n');
        }
        out
    }

    /// Summary JSON: totals, per-profile counts, and the edge list with
    /// orientation and resolution step.
    pub fn summary_json(&self) -> serde_json::Value {
        let shape = self.empirical.shape();
        let edges: Vec<serde_json::Value> = self
            .problems
            .iter()
            .zip(self.graph.edges())
            .map(|(p, e)| {
                let step = match &p.status {
                    ProblemStatus::Resolved { step, .. } => Some(*step),
                    ProblemStatus::Unresolved => None,
                };
                serde_json::json!({
                    "from": shape.profile(e.from),
                    "to": shape.profile(e.to),
                    "player": e.player,
                    "kind": format!("{:?}", e.kind),
                    "resolved_at_step": step,
                })
            })
            .collect();
        serde_json::json!({
            "total_samples": self.total_samples,
            "truncated": self.truncated,
            "profile_counts": self.empirical.counts(),
            "edges": edges,
        })
    }
}

struct Engine<'a, S: OutcomeSimulator + ?Sized> {
    sim: &'a S,
    shape: GameShape,
    delta: f64,
    scheme: SamplingScheme,
    criterion: StoppingCriterion,
    budget_cap: u64,
    problems: Vec<ComparisonProblem>,
    /// problem indices incident to each flat profile
    incidence: Vec<Vec<usize>>,
    empirical: EmpiricalPayoffs,
    /// Exactly-known payoffs (symmetric variant's diagonal): the profile is
    /// never sampled and its interval is the degenerate point.
    known: Vec<Option<f64>>,
    /// Mirror profile for the symmetric variant (identity otherwise).
    mirror: Option<Vec<usize>>,
    scheme_state: SchemeState,
    history: Vec<HistoryRecord>,
    unresolved_left: usize,
}

impl<'a, S: OutcomeSimulator + ?Sized> Engine<'a, S> {
    fn new(
        sim: &'a S,
        delta: f64,
        scheme: SamplingScheme,
        criterion: StoppingCriterion,
        budget_cap: u64,
        symmetric: bool,
    ) -> Result<Self> {
        if budget_cap < 1 {
            return Err(Error::input("budget_cap must be >= 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::input(format!("delta = {delta} outside (0, 1)")));
        }
        let shape = sim.shape().clone();
        let n = shape.num_profiles();
        let problems = build_comparison_list(&shape);
        let mut incidence = vec![Vec::new(); n];
        for (i, p) in problems.iter().enumerate() {
            incidence[p.profile_a].push(i);
            incidence[p.profile_b].push(i);
        }
        let mut known = vec![None; n];
        let mirror = if symmetric {
            let counts = shape.strategy_counts();
            if counts.len() != 2 || counts[0] != counts[1] {
                return Err(Error::input(
                    "symmetric sampling needs a two-player game with equal strategy counts",
                ));
            }
            let (a, b) = sim.outcome_range();
            let mid = 0.5 * (a + b);
            let m = counts[0];
            let mut mir = vec![0usize; n];
            for i in 0..m {
                for j in 0..m {
                    mir[i * m + j] = j * m + i;
                }
                // self-play payoff is the constant-sum midpoint, known for free
                known[i * m + i] = Some(mid);
            }
            Some(mir)
        } else {
            None
        };
        let unresolved_left = problems.len();
        Ok(Engine {
            sim,
            shape: shape.clone(),
            delta,
            scheme,
            criterion,
            budget_cap,
            problems,
            incidence,
            empirical: EmpiricalPayoffs::new(shape),
            known,
            mirror,
            scheme_state: SchemeState::default(),
            history: Vec::new(),
            unresolved_left,
        })
    }

    fn sampleable(&self, flat: usize) -> bool {
        self.known[flat].is_none()
    }

    fn mean_and_interval(
        &self,
        player: usize,
        flat: usize,
        f: f64,
    ) -> Result<Option<(f64, ConfidenceInterval)>> {
        if let Some(v) = self.known[flat] {
            return Ok(Some((
                v,
                ConfidenceInterval { lower: v, upper: v, method: self.criterion.method, level: f },
            )));
        }
        match self.empirical.mean(player, flat) {
            None => Ok(None),
            Some(mean) => {
                let n = self.empirical.count(flat);
                let ci = confidence_interval(
                    self.criterion.method,
                    mean,
                    n,
                    f,
                    self.sim.outcome_range(),
                )?;
                Ok(Some((mean, ci)))
            }
        }
    }

    /// Effective sample count of a profile (known-exact profiles stay 0).
    fn count(&self, flat: usize) -> u64 {
        self.empirical.count(flat)
    }

    fn try_resolve(&mut self, idx: usize, step: u64) -> Result<bool> {
        let (player, a, b) = {
            let p = &self.problems[idx];
            (p.player, p.profile_a, p.profile_b)
        };
        let t = self.count(a) + self.count(b);
        if t == 0 {
            return Ok(false);
        }
        let f = allocate_confidence(self.delta, &self.shape, t);
        let Some((mean_a, ci_a)) = self.mean_and_interval(player, a, f)? else {
            return Ok(false);
        };
        let Some((mean_b, ci_b)) = self.mean_and_interval(player, b, f)? else {
            return Ok(false);
        };
        if let Some(direction) = is_resolved(&self.criterion, &ci_a, &ci_b, mean_a, mean_b) {
            self.problems[idx].status = ProblemStatus::Resolved { direction, step, ci_a, ci_b };
            self.unresolved_left -= 1;
            if self.scheme_state.ue_commitment.map(|(i, _)| i) == Some(idx) {
                self.scheme_state.ue_commitment = None;
            }
            return Ok(true);
        }
        Ok(false)
    }

    fn select(&mut self, rng: &mut Rng) -> Result<usize> {
        if self.scheme == SamplingScheme::UniformExhaustive {
            return self.select_ue(rng);
        }
        let n = self.shape.num_profiles();
        let mut valence = vec![0u64; n];
        for p in &self.problems {
            if !p.is_resolved() {
                valence[p.profile_a] += 1;
                valence[p.profile_b] += 1;
            }
        }
        let active: Vec<usize> =
            (0..n).filter(|&s| valence[s] > 0 && self.sampleable(s)).collect();
        if active.is_empty() {
            return Err(Error::contract("no sampleable profile among unresolved comparisons"));
        }
        let valences: Vec<u64> = active.iter().map(|&s| valence[s]).collect();
        let counts: Vec<u64> = active.iter().map(|&s| self.count(s)).collect();
        let view = SelectionView { active: &active, valence: &valences, counts: &counts };
        Ok(match self.scheme {
            SamplingScheme::Uniform => schemes::select_uniform(&view, rng),
            SamplingScheme::ValenceWeighted => schemes::select_valence_weighted(&view, rng),
            SamplingScheme::CountWeighted => schemes::select_count_weighted(&view),
            SamplingScheme::UniformExhaustive => unreachable!(),
        })
    }

    fn select_ue(&mut self, rng: &mut Rng) -> Result<usize> {
        if self.scheme_state.ue_commitment.is_none() {
            let open: Vec<usize> =
                (0..self.problems.len()).filter(|&i| !self.problems[i].is_resolved()).collect();
            if open.is_empty() {
                return Err(Error::contract("UE selection with no unresolved comparisons"));
            }
            let pick = open[rng.gen_range(0..open.len())];
            self.scheme_state.ue_commitment = Some((pick, true));
        }
        let (idx, a_next) = self.scheme_state.ue_commitment.unwrap();
        let p = &self.problems[idx];
        let (first, second) =
            if a_next { (p.profile_a, p.profile_b) } else { (p.profile_b, p.profile_a) };
        let choice = if self.sampleable(first) {
            self.scheme_state.ue_commitment = Some((idx, !a_next));
            first
        } else if self.sampleable(second) {
            // keep the turn parity; the known profile never takes a sample
            second
        } else {
            return Err(Error::contract("UE committed to a pair with no sampleable profile"));
        };
        Ok(choice)
    }

    fn run(mut self, rng: &mut Rng) -> Result<RgucbResult> {
        let mut step: u64 = 0;
        let mut truncated = false;
        while self.unresolved_left > 0 {
            if step >= self.budget_cap {
                truncated = true;
                break;
            }
            let flat = self.select(rng)?;
            let outcome = self.sim.simulate_flat(flat, rng);
            step += 1;
            self.empirical.record(flat, &outcome);
            let mut touched = vec![flat];
            if let Some(mir) = &self.mirror {
                let twin = mir[flat];
                if twin != flat {
                    let swapped: Vec<f64> = outcome.iter().rev().copied().collect();
                    self.empirical.record(twin, &swapped);
                    touched.push(twin);
                }
            }
            let mut resolved = Vec::new();
            for &t in &touched {
                for i in 0..self.incidence[t].len() {
                    let idx = self.incidence[t][i];
                    if !self.problems[idx].is_resolved() && self.try_resolve(idx, step)? {
                        resolved.push(idx);
                    }
                }
            }
            resolved.sort_unstable();
            resolved.dedup();
            self.history.push(HistoryRecord {
                step,
                profile: self.shape.profile(flat),
                outcome,
                resolved,
            });
        }
        let graph = self.build_graph();
        Ok(RgucbResult {
            empirical: self.empirical,
            graph,
            problems: self.problems,
            history: self.history,
            truncated,
            total_samples: step,
        })
    }

    /// Orient every pair by current empirical means; unresolved pairs are
    /// flagged uncertain (ties stay ties).
    fn build_graph(&self) -> ResponseGraph {
        let mut edges = Vec::with_capacity(self.problems.len());
        for p in &self.problems {
            let value = |flat: usize| {
                self.known[flat]
                    .or_else(|| self.empirical.mean(p.player, flat))
            };
            let (ma, mb) = (value(p.profile_a), value(p.profile_b));
            let (from, to, tied) = match (ma, mb) {
                (Some(a), Some(b)) if a > b => (p.profile_b, p.profile_a, false),
                (Some(a), Some(b)) if b > a => (p.profile_a, p.profile_b, false),
                _ => (p.profile_a, p.profile_b, true),
            };
            let kind = if tied {
                EdgeKind::Tie
            } else if p.is_resolved() {
                EdgeKind::Certain
            } else {
                EdgeKind::Uncertain
            };
            edges.push(ResponseEdge { from, to, player: p.player, kind });
        }
        ResponseGraph::new(self.shape.clone(), edges)
    }
}

/// Runs Algorithm 1: sample, update, and resolve until every comparison
/// closes or the budget is spent. A spent budget yields a truncated (not
/// failed) result with the current best-effort graph.
pub fn run_response_graph_ucb<S: OutcomeSimulator + ?Sized>(
    sim: &S,
    delta: f64,
    scheme: SamplingScheme,
    criterion: StoppingCriterion,
    budget_cap: u64,
    rng: &mut Rng,
) -> Result<RgucbResult> {
    Engine::new(sim, delta, scheme, criterion, budget_cap, false)?.run(rng)
}

/// Symmetric constant-sum variant: each outcome for profile (i, j) also
/// updates (j, i) with the players swapped (a free observation), and
/// self-play payoffs are pinned at the constant-sum midpoint without
/// sampling.
pub fn run_symmetric_rgucb<S: OutcomeSimulator + ?Sized>(
    sim: &S,
    delta: f64,
    scheme: SamplingScheme,
    criterion: StoppingCriterion,
    budget_cap: u64,
    rng: &mut Rng,
) -> Result<RgucbResult> {
    Engine::new(sim, delta, scheme, criterion, budget_cap, true)?.run(rng)
}
