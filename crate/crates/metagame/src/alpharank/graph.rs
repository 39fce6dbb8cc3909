//! Response graphs and their sink strongly connected components.

use crate::game::{GameShape, PayoffTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EdgeKind {
    /// Direction established by the payoffs (or resolved with high
    /// confidence by a sampler).
    Certain,
    /// Direction is a best-effort guess (e.g. budget-truncated sampling).
    Uncertain,
    /// Exactly equal payoffs; the edge is effectively bidirectional.
    Tie,
}

/// A directed single-deviation edge, stored once per unordered profile
/// pair. `from`/`to` are flat profile indices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResponseEdge {
    pub from: usize,
    pub to: usize,
    pub player: usize,
    pub kind: EdgeKind,
}

/// Directed graph over strategy profiles with edges along single-player
/// better-response deviations.
#[derive(Debug, Clone)]
pub struct ResponseGraph {
    shape: GameShape,
    edges: Vec<ResponseEdge>,
}

impl ResponseGraph {
    pub fn new(shape: GameShape, edges: Vec<ResponseEdge>) -> Self {
        ResponseGraph { shape, edges }
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn edges(&self) -> &[ResponseEdge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.shape.num_profiles()
    }

    /// The edge (if any) recorded for the unordered pair `{a, b}`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<&ResponseEdge> {
        self.edges
            .iter()
            .find(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
    }
}

/// Better-response graph of a game: each single-deviation pair gets an
/// edge directed toward the profile giving the deviating player the
/// strictly higher payoff; exact ties are flagged.
pub fn response_graph(game: &PayoffTensor) -> ResponseGraph {
    let shape = game.shape().clone();
    let mut edges = Vec::new();
    for flat in 0..shape.num_profiles() {
        for (k, nb) in shape.neighbors(flat) {
            if nb < flat {
                continue; // one record per unordered pair
            }
            let a = game.get_flat(k, flat);
            let b = game.get_flat(k, nb);
            let edge = if a == b {
                ResponseEdge {
                    from: flat,
                    to: nb,
                    player: k,
                    kind: EdgeKind::Tie,
                }
            } else if b > a {
                ResponseEdge {
                    from: flat,
                    to: nb,
                    player: k,
                    kind: EdgeKind::Certain,
                }
            } else {
                ResponseEdge {
                    from: nb,
                    to: flat,
                    player: k,
                    kind: EdgeKind::Certain,
                }
            };
            edges.push(edge);
        }
    }
    ResponseGraph::new(shape, edges)
}

/// Sink strongly connected components of a response graph, each returned
/// as a sorted list of flat profile indices. Tie edges connect both ways,
/// merging their endpoints' components.
pub fn find_mccs(graph: &ResponseGraph) -> Vec<Vec<usize>> {
    let n = graph.num_nodes();
    let mut adj = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.from].push(e.to);
        if e.kind == EdgeKind::Tie {
            adj[e.to].push(e.from);
        }
    }
    let comp = strongly_connected_components(&adj);
    let num_comps = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut has_out = vec![false; num_comps];
    for u in 0..n {
        for &v in &adj[u] {
            if comp[u] != comp[v] {
                has_out[comp[u]] = true;
            }
        }
    }
    let mut sinks: Vec<Vec<usize>> = vec![Vec::new(); num_comps];
    for u in 0..n {
        if !has_out[comp[u]] {
            sinks[comp[u]].push(u);
        }
    }
    sinks.retain(|s| !s.is_empty());
    sinks.iter_mut().for_each(|s| s.sort_unstable());
    sinks.sort();
    sinks
}

/// Kosaraju with explicit stacks; returns a component id per node.
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // iterative post-order DFS
        let mut stack = vec![(start, 0usize)];
        visited[start] = true;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let v = adj[u][*i];
                *i += 1;
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            radj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut num = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = num;
        while let Some(u) = stack.pop() {
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = num;
                    stack.push(v);
                }
            }
        }
        num += 1;
    }
    comp
}
