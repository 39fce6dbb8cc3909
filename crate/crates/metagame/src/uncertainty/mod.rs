//! Propagation of element-wise payoff bounds into confidence intervals on
//! infinite-alpha ranking weights.
//!
//! Payoff intervals classify each response-graph edge as certain or
//! uncertain. Membership of a profile in a sink component ("can this
//! profile be ranked to zero?") is decided by a forced-ancestor /
//! forced-descendant analysis, and the interval endpoints for pi(s) come
//! from extremal mean return times of a stochastic shortest path problem
//! whose actions orient the uncertain edges. Dropping the consistency
//! constraint between the two endpoints of an edge does not change the
//! optimal value, so plain value iteration suffices.

use crate::alpharank::{EdgeKind, PopulationMode, ResponseEdge, ResponseGraph};
use crate::game::{GameShape, PayoffTensor};
use crate::{Error, Result};


/// Element-wise payoff bounds `L <= M <= U`.
#[derive(Debug, Clone)]
pub struct PayoffBounds {
    lower: PayoffTensor,
    upper: PayoffTensor,
}

impl PayoffBounds {
    pub fn new(lower: PayoffTensor, upper: PayoffTensor) -> Result<Self> {
        if lower.shape() != upper.shape() {
            return Err(Error::input("payoff bounds must share a shape"));
        }
        for k in 0..lower.shape().num_players() {
            for s in 0..lower.shape().num_profiles() {
                if lower.get_flat(k, s) > upper.get_flat(k, s) {
                    return Err(Error::input(format!(
                        "lower bound exceeds upper bound for player {k} at profile {s}"
                    )));
                }
            }
        }
        Ok(PayoffBounds { lower, upper })
    }

    /// Degenerate bounds `L = U = M`.
    pub fn exact(game: &PayoffTensor) -> Self {
        PayoffBounds { lower: game.clone(), upper: game.clone() }
    }

    /// Interval of half-width `w` around each entry, clipped to `[lo, hi]`.
    pub fn around(game: &PayoffTensor, w: f64, clip: (f64, f64)) -> Result<Self> {
        if w < 0.0 {
            return Err(Error::input("interval half-width must be nonnegative"));
        }
        let mut lower = game.clone();
        let mut upper = game.clone();
        for k in 0..game.shape().num_players() {
            for s in 0..game.shape().num_profiles() {
                let v = game.get_flat(k, s);
                lower.set_flat(k, s, (v - w).max(clip.0));
                upper.set_flat(k, s, (v + w).min(clip.1).max((v - w).max(clip.0)));
            }
        }
        PayoffBounds::new(lower, upper)
    }

    pub fn shape(&self) -> &GameShape {
        self.lower.shape()
    }

    pub fn lower(&self) -> &PayoffTensor {
        &self.lower
    }

    pub fn upper(&self) -> &PayoffTensor {
        &self.upper
    }
}

/// Direction status of a single-deviation edge under interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Direction certain: `from -> to` (the two payoff intervals are
    /// disjoint; touching endpoints count as certain).
    Certain { from: usize, to: usize },
    /// Both intervals are the same single point: an exact tie.
    Tie,
    /// The intervals overlap; either direction is plausible.
    Uncertain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedEdge {
    /// Flat profile indices with `a < b`.
    pub a: usize,
    pub b: usize,
    pub player: usize,
    pub class: EdgeClass,
}

/// A response graph whose edge set is split into certain and uncertain
/// parts. Every single-deviation pair appears exactly once.
#[derive(Debug, Clone)]
pub struct UncertainResponseGraph {
    shape: GameShape,
    edges: Vec<ClassifiedEdge>,
}

impl UncertainResponseGraph {
    pub fn new(shape: GameShape, edges: Vec<ClassifiedEdge>) -> Self {
        UncertainResponseGraph { shape, edges }
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn edges(&self) -> &[ClassifiedEdge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.shape.num_profiles()
    }

    pub fn num_uncertain(&self) -> usize {
        self.edges.iter().filter(|e| e.class == EdgeClass::Uncertain).count()
    }

    /// Indices (into `edges`) of the uncertain edges.
    pub fn uncertain_indices(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].class == EdgeClass::Uncertain)
            .collect()
    }

    /// A plain response graph, available only when no edge is uncertain.
    pub fn to_response_graph(&self) -> Option<ResponseGraph> {
        let mut out = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let edge = match e.class {
                EdgeClass::Certain { from, to } => {
                    ResponseEdge { from, to, player: e.player, kind: EdgeKind::Certain }
                }
                EdgeClass::Tie => {
                    ResponseEdge { from: e.a, to: e.b, player: e.player, kind: EdgeKind::Tie }
                }
                EdgeClass::Uncertain => return None,
            };
            out.push(edge);
        }
        Some(ResponseGraph::new(self.shape.clone(), out))
    }

    /// The directed response graph under one orientation of the uncertain
    /// edges: bit `i` of `mask` set means the `i`-th uncertain edge points
    /// `a -> b`.
    pub fn orient(&self, mask: u64) -> ResponseGraph {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut u = 0;
        for e in &self.edges {
            let edge = match e.class {
                EdgeClass::Certain { from, to } => {
                    ResponseEdge { from, to, player: e.player, kind: EdgeKind::Certain }
                }
                EdgeClass::Tie => {
                    ResponseEdge { from: e.a, to: e.b, player: e.player, kind: EdgeKind::Tie }
                }
                EdgeClass::Uncertain => {
                    let (from, to) = if mask >> u & 1 == 1 { (e.a, e.b) } else { (e.b, e.a) };
                    u += 1;
                    ResponseEdge { from, to, player: e.player, kind: EdgeKind::Certain }
                }
            };
            out.push(edge);
        }
        ResponseGraph::new(self.shape.clone(), out)
    }
}

fn classify_pair(ia: (f64, f64), ib: (f64, f64), a: usize, b: usize) -> EdgeClass {
    let (la, ua) = ia;
    let (lb, ub) = ib;
    let overlap = ua.min(ub) - la.max(lb);
    if overlap > 0.0 {
        EdgeClass::Uncertain
    } else if la == ua && lb == ub && la == lb {
        EdgeClass::Tie
    } else if ua <= lb {
        EdgeClass::Certain { from: a, to: b }
    } else {
        EdgeClass::Certain { from: b, to: a }
    }
}

/// Splits the single-deviation pairs into certainly-directed and uncertain
/// edges according to the deviating player's two payoff intervals.
pub fn classify_edges(bounds: &PayoffBounds) -> UncertainResponseGraph {
    let shape = bounds.shape().clone();
    let mut edges = Vec::new();
    for flat in 0..shape.num_profiles() {
        for (k, nb) in shape.neighbors(flat) {
            if nb < flat {
                continue;
            }
            let ia = (bounds.lower.get_flat(k, flat), bounds.upper.get_flat(k, flat));
            let ib = (bounds.lower.get_flat(k, nb), bounds.upper.get_flat(k, nb));
            edges.push(ClassifiedEdge { a: flat, b: nb, player: k, class: classify_pair(ia, ib, flat, nb) });
        }
    }
    UncertainResponseGraph::new(shape, edges)
}

/// Single-population analogue for symmetric two-player games: nodes are
/// the `n` strategies and the deviation `s -> t` compares `M^1(t, s)` with
/// `M^1(s, t)`.
pub fn classify_edges_single_population(bounds: &PayoffBounds) -> Result<UncertainResponseGraph> {
    let counts = bounds.shape().strategy_counts();
    if counts.len() != 2 || counts[0] != counts[1] {
        return Err(Error::input(
            "single-population classification needs a two-player game with equal strategy counts",
        ));
    }
    let n = counts[0];
    let mut edges = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            // payoff of the focal strategy in each pairing
            let i_s = (bounds.lower.get_flat(0, s * n + t), bounds.upper.get_flat(0, s * n + t));
            let i_t = (bounds.lower.get_flat(0, t * n + s), bounds.upper.get_flat(0, t * n + s));
            edges.push(ClassifiedEdge { a: s, b: t, player: 0, class: classify_pair(i_s, i_t, s, t) });
        }
    }
    Ok(UncertainResponseGraph::new(GameShape::new(vec![n])?, edges))
}

/// Adjacency of the certainly-directed part (ties go both ways).
fn certain_adjacency(graph: &UncertainResponseGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); graph.num_nodes()];
    for e in graph.edges() {
        match e.class {
            EdgeClass::Certain { from, to } => adj[from].push(to),
            EdgeClass::Tie => {
                adj[e.a].push(e.b);
                adj[e.b].push(e.a);
            }
            EdgeClass::Uncertain => {}
        }
    }
    adj
}

fn reachable_from(start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            rev[v].push(u);
        }
    }
    rev
}

/// Can the bounds be realized so that `s` lies outside every MCC (making
/// `inf pi(s) = 0`)?
///
/// Forced-ancestor / forced-descendant procedure: with `F_A` (profiles that
/// certainly reach `s`) and `F_D` (profiles `s` certainly reaches), a
/// descendant outside `F_A` immediately excludes `s`. Otherwise uncertain
/// edges are greedily oriented toward the escaping part of `F_A` until the
/// escaping set stops growing; `s` is excludable exactly when it escapes.
pub fn mcc_membership_excludable(s: usize, graph: &UncertainResponseGraph) -> bool {
    let n = graph.num_nodes();
    let adj = certain_adjacency(graph);
    let f_d = reachable_from(s, &adj);
    let f_a = reachable_from(s, &reverse(&adj));
    if (0..n).any(|u| f_d[u] && !f_a[u]) {
        return true;
    }

    // Directed edges available so far: all certain edges, plus uncertain
    // edges once an orientation has been committed. Boundary uncertain
    // edges (one endpoint outside F_A) are committed outward immediately.
    let mut extra: Vec<(usize, usize)> = Vec::new();
    let mut committed = vec![false; graph.edges().len()];
    for (i, e) in graph.edges().iter().enumerate() {
        if e.class != EdgeClass::Uncertain {
            continue;
        }
        match (f_a[e.a], f_a[e.b]) {
            (true, false) => {
                extra.push((e.a, e.b));
                committed[i] = true;
            }
            (false, true) => {
                extra.push((e.b, e.a));
                committed[i] = true;
            }
            _ => {}
        }
    }

    loop {
        // escaping = profiles of F_A with a directed path out of F_A
        let mut dir = adj.clone();
        for &(u, v) in &extra {
            dir[u].push(v);
        }
        let rev = reverse(&dir);
        let mut escaping = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        for u in 0..n {
            if !f_a[u] {
                escaping[u] = true; // outside F_A counts as escaped
                stack.push(u);
            }
        }
        while let Some(u) = stack.pop() {
            for &w in &rev[u] {
                if !escaping[w] {
                    escaping[w] = true;
                    stack.push(w);
                }
            }
        }
        if escaping[s] {
            return true;
        }
        if (0..n).all(|u| !f_a[u] || escaping[u]) {
            return true; // F_A,out = F_A, so s escapes too
        }
        // orient remaining uncertain edges across the split toward the
        // escaping side and retry
        let mut progress = false;
        for (i, e) in graph.edges().iter().enumerate() {
            if committed[i] || e.class != EdgeClass::Uncertain {
                continue;
            }
            match (escaping[e.a], escaping[e.b]) {
                (false, true) => {
                    extra.push((e.a, e.b));
                    committed[i] = true;
                    progress = true;
                }
                (true, false) => {
                    extra.push((e.b, e.a));
                    committed[i] = true;
                    progress = true;
                }
                _ => {}
            }
        }
        if !progress {
            return false;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

/// Transition-law parameters for the infinite-alpha chain: population size
/// `m` (tie transitions move with probability eta/m) and the perturbation
/// `eps_p` applied to payoff-worsening moves.
#[derive(Debug, Clone, Copy)]
pub struct SspParams {
    pub m: u32,
    pub eps_p: f64,
}

impl Default for SspParams {
    fn default() -> Self {
        SspParams { m: 50, eps_p: 0.0 }
    }
}

const VALUE_TOL: f64 = 1e-11;

struct SspInstance {
    /// fixed transitions per state: (dest, weight)
    fixed: Vec<Vec<(usize, f64)>>,
    /// uncertain edges incident to each state: destination endpoint
    uncertain: Vec<Vec<usize>>,
    eta: f64,
    eps_p: f64,
}

fn build_instance(graph: &UncertainResponseGraph, params: &SspParams) -> SspInstance {
    let n = graph.num_nodes();
    let eta = graph.shape().eta();
    let mut fixed = vec![Vec::new(); n];
    let mut uncertain = vec![Vec::new(); n];
    for e in graph.edges() {
        match e.class {
            EdgeClass::Certain { from, to } => {
                fixed[from].push((to, eta));
                if params.eps_p > 0.0 {
                    fixed[to].push((from, eta * params.eps_p));
                }
            }
            EdgeClass::Tie => {
                let w = eta / params.m as f64;
                fixed[e.a].push((e.b, w));
                fixed[e.b].push((e.a, w));
            }
            EdgeClass::Uncertain => {
                uncertain[e.a].push(e.b);
                uncertain[e.b].push(e.a);
            }
        }
    }
    SspInstance { fixed, uncertain, eta, eps_p: params.eps_p }
}

impl SspInstance {
    /// Expected cost at `u` for one orientation choice `mask` of its
    /// incident uncertain edges (bit set = directed out of `u`), given the
    /// current value estimates. The column of the target `s` is zeroed.
    fn backup(&self, u: usize, s: usize, mask: u64, phi: &[f64]) -> f64 {
        let val = |v: usize| if v == s { 0.0 } else { phi[v] };
        let mut total = 1.0;
        let mut rest = 1.0;
        // zero-weight terms are skipped outright: 0 * inf would poison the
        // backup with NaN
        for &(dest, w) in &self.fixed[u] {
            rest -= w;
            if w > 0.0 {
                total += w * val(dest);
            }
        }
        for (i, &dest) in self.uncertain[u].iter().enumerate() {
            let w = if mask >> i & 1 == 1 { self.eta } else { self.eta * self.eps_p };
            rest -= w;
            if w > 0.0 {
                total += w * val(dest);
            }
        }
        if u != s && rest > 0.0 {
            total += rest * val(u);
        }
        total
    }
}

impl SspInstance {
    /// Positive-probability successors of `u` under orientation `mask`,
    /// including the self-loop when the remainder is positive.
    fn mask_support(&self, u: usize, mask: u64) -> Vec<usize> {
        let mut sup = Vec::new();
        let mut rest = 1.0;
        for &(dest, w) in &self.fixed[u] {
            rest -= w;
            if w > 0.0 {
                sup.push(dest);
            }
        }
        for (i, &dest) in self.uncertain[u].iter().enumerate() {
            let w = if mask >> i & 1 == 1 { self.eta } else { self.eta * self.eps_p };
            rest -= w;
            if w > 0.0 {
                sup.push(dest);
            }
        }
        if rest > VALUE_TOL {
            sup.push(u);
        }
        sup
    }

    fn num_masks(&self, u: usize) -> u64 {
        1u64 << self.uncertain[u].len()
    }

    /// Positive-probability transition weights out of `u` under `mask`,
    /// including the self-loop remainder.
    fn mask_weights(&self, u: usize, mask: u64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut rest = 1.0;
        for &(dest, w) in &self.fixed[u] {
            rest -= w;
            if w > 0.0 {
                out.push((dest, w));
            }
        }
        for (i, &dest) in self.uncertain[u].iter().enumerate() {
            let w = if mask >> i & 1 == 1 { self.eta } else { self.eta * self.eps_p };
            rest -= w;
            if w > 0.0 {
                out.push((dest, w));
            }
        }
        if rest > VALUE_TOL {
            out.push((u, rest));
        }
        out
    }
}

/// States from which some orientation policy hits `s` with probability 1
/// (equivalently: finite optimal expected hitting time). Standard nested
/// fixpoint for existential almost-sure reachability. Also returns, per
/// state in the set, a witness mask; together these form an attractor
/// strategy that reaches `s` almost surely (a proper policy).
fn finite_under_best_policy(inst: &SspInstance, s: usize) -> (Vec<bool>, Vec<u64>) {
    let n = inst.fixed.len();
    let mut a = vec![true; n];
    let mut witness = vec![0u64; n];
    loop {
        let mut r = vec![false; n];
        r[s] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for u in 0..n {
                if r[u] || !a[u] {
                    continue;
                }
                let joins = (0..inst.num_masks(u)).find(|&mask| {
                    let sup = inst.mask_support(u, mask);
                    sup.iter().all(|&v| a[v]) && sup.iter().any(|&v| r[v] && v != u)
                });
                if let Some(mask) = joins {
                    r[u] = true;
                    witness[u] = mask;
                    grew = true;
                }
            }
        }
        if r == a {
            return (r, witness);
        }
        a = r;
    }
}

/// States from which every orientation policy hits `s` with probability 1
/// (finite worst-case hitting time): the complement of the states that can
/// reach a trap — a closed set avoiding `s` under some per-state choice.
fn finite_under_worst_policy(inst: &SspInstance, s: usize) -> Vec<bool> {
    let n = inst.fixed.len();
    let mut trap: Vec<bool> = (0..n).map(|u| u != s).collect();
    loop {
        let mut changed = false;
        for u in 0..n {
            if !trap[u] {
                continue;
            }
            let stays = (0..inst.num_masks(u))
                .any(|mask| inst.mask_support(u, mask).iter().all(|&v| trap[v]));
            if !stays {
                trap[u] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // any state (other than s) that can steer into a trap diverges too
    let mut doomed = trap;
    let mut grew = true;
    while grew {
        grew = false;
        for u in 0..n {
            if doomed[u] || u == s {
                continue;
            }
            let escapes = (0..inst.num_masks(u))
                .any(|mask| inst.mask_support(u, mask).iter().any(|&v| doomed[v]));
            if escapes {
                doomed[u] = true;
                grew = true;
            }
        }
    }
    doomed.iter().map(|&d| !d).collect()
}

/// Exact expected hitting times of `s` under a fixed orientation policy,
/// solved as the linear system `phi = Q phi + 1` over the live states
/// (transitions into `s` absorb). Requires every positive-weight successor
/// of a live state to be live or `s` itself.
fn evaluate_policy(
    inst: &SspInstance,
    s: usize,
    live: &[usize],
    policy: &[u64],
) -> Result<Vec<f64>> {
    let k = live.len();
    let mut index = vec![usize::MAX; inst.fixed.len()];
    for (i, &u) in live.iter().enumerate() {
        index[u] = i;
    }
    let mut a = nalgebra::DMatrix::<f64>::identity(k, k);
    let b = nalgebra::DVector::<f64>::from_element(k, 1.0);
    for (i, &u) in live.iter().enumerate() {
        for (dest, w) in inst.mask_weights(u, policy[u]) {
            if dest == s {
                continue;
            }
            if index[dest] == usize::MAX {
                return Err(Error::contract(
                    "policy evaluation reached a state with infinite hitting time",
                ));
            }
            a[(i, index[dest])] -= w;
        }
    }
    a.lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::contract("singular policy-evaluation system"))
}

const POLICY_ITER_CAP: usize = 10_000;

/// Extremal mean return time of `s` over all orientations of the
/// uncertain edges, via unconstrained-SSP policy iteration with exact
/// linear-solve evaluation. The returned value may be infinite (no
/// orientation makes `s` recurrent); for `Maximize` the caller is expected
/// to have ruled out excludability first.
pub fn ssp_extremal_return_time(
    s: usize,
    graph: &UncertainResponseGraph,
    params: &SspParams,
    objective: Objective,
) -> Result<f64> {
    let n = graph.num_nodes();
    if s >= n {
        return Err(Error::input(format!("profile index {s} out of range")));
    }
    let inst = build_instance(graph, params);

    // States whose extremal hitting time is infinite are excluded up front;
    // every policy considered below stays on the finite ("live") states, so
    // each evaluation is a proper SSP with a nonsingular system.
    let (finite, witness) = match objective {
        Objective::Minimize => finite_under_best_policy(&inst, s),
        Objective::Maximize => {
            let finite = finite_under_worst_policy(&inst, s);
            (finite, vec![0u64; n])
        }
    };
    let live: Vec<usize> = (0..n).filter(|&u| u == s || finite[u]).collect();
    let dead = |v: usize| v != s && !finite[v];

    // The value at `s` itself is finite only if some (resp. every) mask at
    // `s` keeps all successors live.
    let s_masks: Vec<u64> = (0..inst.num_masks(s))
        .filter(|&mask| inst.mask_weights(s, mask).iter().all(|&(v, _)| !dead(v)))
        .collect();
    match objective {
        Objective::Minimize if s_masks.is_empty() => return Ok(f64::INFINITY),
        Objective::Maximize if s_masks.len() < inst.num_masks(s) as usize => {
            return Err(Error::contract(
                "maximize-mode SSP diverged for a profile claimed non-excludable",
            ));
        }
        _ => {}
    }

    // Initial proper policy: the attractor witness for Minimize (any policy
    // is proper for Maximize, since every orientation from the live set
    // reaches `s` almost surely).
    let mut policy = witness;
    policy[s] = s_masks[0];

    let mut phi = vec![f64::INFINITY; n];
    for _ in 0..POLICY_ITER_CAP {
        let vals = evaluate_policy(&inst, s, &live, &policy)?;
        for (i, &u) in live.iter().enumerate() {
            phi[u] = vals[i];
        }
        let mut changed = false;
        for &u in &live {
            let current = inst.backup(u, s, policy[u], &phi);
            let mut best_mask = policy[u];
            let mut best = current;
            for mask in 0..inst.num_masks(u) {
                let v = inst.backup(u, s, mask, &phi);
                let improves = match objective {
                    Objective::Minimize => v < best,
                    Objective::Maximize => v > best,
                };
                if improves {
                    best = v;
                    best_mask = mask;
                }
            }
            // switch only on a clear improvement, so ties cannot cycle
            if best_mask != policy[u] && (best - current).abs() > VALUE_TOL * current.abs().max(1.0)
            {
                policy[u] = best_mask;
                changed = true;
            }
        }
        if !changed {
            return Ok(phi[s]);
        }
    }
    Err(Error::NoConvergence { iterations: POLICY_ITER_CAP, residual: f64::NAN })
}

/// Confidence interval `[pi_lo, pi_hi]` on the infinite-alpha ranking
/// weight of one profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RankingInterval {
    pub profile: usize,
    pub pi_lo: f64,
    pub pi_hi: f64,
}

/// Options for interval computation: population size, the perturbation
/// levels to sweep (multi-population), and the population model.
#[derive(Debug, Clone)]
pub struct UncertaintyParams {
    pub m: u32,
    pub perturbations: Vec<f64>,
    pub mode: PopulationMode,
}

impl Default for UncertaintyParams {
    fn default() -> Self {
        UncertaintyParams { m: 50, perturbations: vec![0.0], mode: PopulationMode::MultiPopulation }
    }
}

fn interval_on_graph(
    s: usize,
    graph: &UncertainResponseGraph,
    params: &UncertaintyParams,
) -> Result<RankingInterval> {
    let mut pi_lo = f64::INFINITY;
    let mut pi_hi = f64::NEG_INFINITY;
    let excludable = mcc_membership_excludable(s, graph);
    for &eps_p in &params.perturbations {
        let ssp = SspParams { m: params.m, eps_p };
        let lambda_inf = ssp_extremal_return_time(s, graph, &ssp, Objective::Minimize)?;
        let hi = if lambda_inf.is_infinite() { 0.0 } else { 1.0 / lambda_inf };
        let lo = if excludable {
            0.0
        } else {
            let lambda_sup = ssp_extremal_return_time(s, graph, &ssp, Objective::Maximize)?;
            1.0 / lambda_sup
        };
        pi_lo = pi_lo.min(lo);
        pi_hi = pi_hi.max(hi);
    }
    Ok(RankingInterval { profile: s, pi_lo, pi_hi: pi_hi.clamp(0.0, 1.0) })
}

fn graph_for(bounds: &PayoffBounds, params: &UncertaintyParams) -> Result<UncertainResponseGraph> {
    match params.mode {
        PopulationMode::MultiPopulation => Ok(classify_edges(bounds)),
        PopulationMode::SinglePopulation => classify_edges_single_population(bounds),
    }
}

/// Interval on `pi(s)` over all payoff tables within the bounds. The upper
/// endpoint follows the convention that the MCC containing `s` carries the
/// full stationary mass (conservative for multi-MCC realizations).
pub fn ranking_weight_interval(
    s: usize,
    bounds: &PayoffBounds,
    params: &UncertaintyParams,
) -> Result<RankingInterval> {
    if params.perturbations.is_empty() {
        return Err(Error::input("at least one perturbation level is required"));
    }
    let graph = graph_for(bounds, params)?;
    interval_on_graph(s, &graph, params)
}

/// Intervals for every node of the (possibly single-population) graph.
pub fn all_ranking_intervals(
    bounds: &PayoffBounds,
    params: &UncertaintyParams,
) -> Result<Vec<RankingInterval>> {
    if params.perturbations.is_empty() {
        return Err(Error::input("at least one perturbation level is required"));
    }
    let graph = graph_for(bounds, params)?;
    (0..graph.num_nodes()).map(|s| interval_on_graph(s, &graph, params)).collect()
}

/// Plot-data CSV: one row per state with its interval and the payoff
/// uncertainty level that produced it.
pub fn intervals_to_csv(intervals: &[RankingInterval], level: f64) -> String {
    let mut out = String::from("state,pi_lo,pi_hi,payoff_uncertainty_level\n");
    for iv in intervals {
        out.push_str(&format!("{},{:?},{:?},{:?}\n", iv.profile, iv.pi_lo, iv.pi_hi, level));
    }
    out
}
