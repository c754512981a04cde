//! Hitting-time identities on vertex-transitive radio hyper-graphs.
//!
//! For `w ∈ N(v)` on a vertex-transitive reception graph `G` with `m` edges:
//!
//! ```text
//! h(u, v)  = h(u, N(v)) + h(w, v)
//! h̃(u, v) = h(u, v) − h(w, v)          (raw edge-process value)
//!          = m (R_uv − R_wv)
//! ```
//!
//! Each side is computed by a different solver: vertex hitting on `G`, the
//! edge-process radio solver on the hyper-graph, and the grounded Laplacian.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hypergraph::RadioHypergraph;

use super::{effective_resistance, hitting_times, Analyzer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transitivity {
    Transitive,
    NotTransitive,
    /// The automorphism search ran out of budget.
    Unknown,
}

/// Search budget (backtracking nodes) per target vertex.
const SEARCH_BUDGET: usize = 200_000;

fn bfs_layer_profile(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut counts = vec![1];
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                if counts.len() <= dist[y] {
                    counts.push(0);
                }
                counts[dist[y]] += 1;
                queue.push_back(y);
            }
        }
    }
    counts
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    bits: Vec<Vec<bool>>,
    profile: Vec<Vec<usize>>,
    order: Vec<usize>,
    parent: Vec<usize>,
    image: Vec<usize>,
    used: Vec<bool>,
    budget: usize,
}

impl Search<'_> {
    fn consistent(&self, i: usize, c: usize) -> bool {
        let x = self.order[i];
        self.order[..i]
            .iter()
            .all(|&y| self.bits[x][y] == self.bits[c][self.image[y]])
    }

    /// `Some(true)` when an extension exists, `None` when the budget ran out.
    fn extend(&mut self, i: usize) -> Option<bool> {
        if i == self.order.len() {
            return Some(true);
        }
        let x = self.order[i];
        let anchor = self.image[self.parent[x]];
        let candidates: Vec<usize> = self.adj[anchor]
            .iter()
            .copied()
            .filter(|&c| !self.used[c] && self.profile[c] == self.profile[x])
            .collect();
        for c in candidates {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            if !self.consistent(i, c) {
                continue;
            }
            self.image[x] = c;
            self.used[c] = true;
            match self.extend(i + 1) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.used[c] = false;
        }
        Some(false)
    }
}

/// Searches for a graph automorphism mapping `from` to `to`.
///
/// Returns `Ok(Some(map))` on success, `Ok(None)` when none exists, and
/// `Err` if the search budget is exhausted.
pub fn find_automorphism(
    g: &Graph,
    from: usize,
    to: usize,
) -> std::result::Result<Option<Vec<usize>>, ()> {
    let n = g.vertex_count();
    let adj: Vec<Vec<usize>> = g
        .adjacency_lists()
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.sort_unstable();
            a.dedup();
            a
        })
        .collect();
    if g.first_parallel_edge().is_some() || !g.is_connected() {
        return Err(());
    }
    let profile: Vec<Vec<usize>> = (0..n).map(|v| bfs_layer_profile(&adj, v)).collect();
    if profile[from] != profile[to] {
        return Ok(None);
    }
    let mut order = vec![from];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }
    }
    let mut search = Search {
        adj: &adj,
        bits: g.adjacency_bits(),
        profile,
        order,
        parent,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        budget: SEARCH_BUDGET,
    };
    search.image[from] = to;
    search.used[to] = true;
    match search.extend(1) {
        Some(true) => Ok(Some(search.image)),
        Some(false) => Ok(None),
        None => Err(()),
    }
}

/// Decides vertex-transitivity by finding an automorphism `0 ↦ t` for every `t`.
pub fn vertex_transitivity(g: &Graph) -> Transitivity {
    if g.vertex_count() == 0 || !g.is_regular() {
        return Transitivity::NotTransitive;
    }
    let mut unknown = false;
    for t in 1..g.vertex_count() {
        match find_automorphism(g, 0, t) {
            Ok(Some(_)) => {}
            Ok(None) => return Transitivity::NotTransitive,
            Err(()) => unknown = true,
        }
    }
    if unknown {
        Transitivity::Unknown
    } else {
        Transitivity::Transitive
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitiveReport {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    pub transitivity: Transitivity,
    /// Set when the identities were not checked, with the reason.
    pub skipped: Option<String>,
    pub edges: usize,
    pub hitting_uv: f64,
    pub hitting_u_nv: f64,
    pub hitting_wv: f64,
    pub radio_raw: f64,
    pub radio: f64,
    pub resistance_uv: f64,
    pub resistance_wv: f64,
    /// `|h(u,v) − h(u,N(v)) − h(w,v)|`.
    pub lemma_residual: f64,
    /// `|raw h̃(u,v) − (h(u,v) − h(w,v))|`.
    pub radio_residual: f64,
    /// `|(h(u,v) − h(w,v)) − m (R_uv − R_wv)|`.
    pub resistance_residual: f64,
    pub max_residual: f64,
}

/// Checks the three identities for the pair `(u, v)`, with `w` the
/// smallest-index neighbour of `v`.
pub fn transitive_identities(r: &RadioHypergraph, u: usize, v: usize) -> Result<TransitiveReport> {
    let n = r.vertex_count();
    if u >= n || v >= n || u == v {
        return Err(Error::InvalidParameter(format!(
            "need distinct vertices below {n}, got ({u}, {v})"
        )));
    }
    let g = r
        .reception_graph()
        .ok_or_else(|| Error::InvalidParameter("reception relation is not symmetric".into()))?;
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    let mut nv: Vec<usize> = g.neighbors(v).to_vec();
    nv.sort_unstable();
    nv.dedup();
    let w = nv[0];

    let transitivity = vertex_transitivity(&g);
    let mut report = TransitiveReport {
        u,
        v,
        w,
        transitivity,
        skipped: None,
        edges: g.edge_count(),
        hitting_uv: f64::NAN,
        hitting_u_nv: f64::NAN,
        hitting_wv: f64::NAN,
        radio_raw: f64::NAN,
        radio: f64::NAN,
        resistance_uv: f64::NAN,
        resistance_wv: f64::NAN,
        lemma_residual: f64::NAN,
        radio_residual: f64::NAN,
        resistance_residual: f64::NAN,
        max_residual: f64::NAN,
    };
    if transitivity != Transitivity::Transitive {
        report.skipped = Some(format!(
            "reception graph is not known to be vertex-transitive ({transitivity:?})"
        ));
        return Ok(report);
    }

    let p = g.simple_walk_matrix();
    let to_v = hitting_times(&p, &[v])?;
    let to_nv = hitting_times(&p, &nv)?;
    report.hitting_uv = to_v.values[u];
    report.hitting_wv = to_v.values[w];
    report.hitting_u_nv = to_nv.values[u];

    let radio = Analyzer::directed(r.as_directed())?.radio_hitting(u, &[v])?;
    report.radio_raw = radio.raw;
    report.radio = radio.value;

    report.resistance_uv = effective_resistance(&g, u, v)?;
    report.resistance_wv = effective_resistance(&g, w, v)?;

    let gap = report.hitting_uv - report.hitting_wv;
    report.lemma_residual = (report.hitting_uv - report.hitting_u_nv - report.hitting_wv).abs();
    report.radio_residual = (report.radio_raw - gap).abs();
    report.resistance_residual =
        (gap - report.edges as f64 * (report.resistance_uv - report.resistance_wv)).abs();
    report.max_residual = report
        .lemma_residual
        .max(report.radio_residual)
        .max(report.resistance_residual);
    Ok(report)
}
