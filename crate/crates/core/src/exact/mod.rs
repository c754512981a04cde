//! Exact hitting and radio hitting times.
//!
//! Hitting times solve the usual first-step system `h = 1 + M h` off the
//! target with `h = 0` on it. Radio hitting times go through the edge
//! process: with `E(U)` the edges heard by some vertex of `U` and
//! `λ₀ = X(0) A`, the number of edge-process steps before entering `E(U)` is
//! `Σ_e λ₀(e) h_e^{E(U)}` (the "raw" value). Counting transmissions instead,
//! the walk needs one more: `h̃(v, U) = 1 + raw` for `v ∉ U` and `0` for
//! `v ∈ U`.

mod electrical;
mod transitive;

pub use electrical::{
    commute_check, effective_resistance, foster_sum, resistance_matrix, CommuteReport,
    FosterReport, COMMUTE_TOL,
};
pub use transitive::{
    find_automorphism, transitive_identities, vertex_transitivity, TransitiveReport, Transitivity,
};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{AnyHypergraph, DirectedHypergraph, Hypergraph, RadioHypergraph};
use crate::io::float_or_inf;
use crate::linalg::{guard_size, solve_refined};
use crate::walk::{build_directed_operators, build_operators, WalkModel};

/// Expected hitting times of a target set from every state.
#[derive(Debug, Clone, Serialize)]
pub struct HittingResult {
    pub target: Vec<usize>,
    /// One entry per state; `inf` where the target is hit with probability < 1.
    #[serde(with = "float_or_inf::vec")]
    pub values: Vec<f64>,
    pub reachable: Vec<bool>,
    /// Largest off-target residual of `h = 1 + M h` over finite states.
    pub residual: f64,
}

impl HittingResult {
    pub fn value(&self, state: usize) -> f64 {
        self.values[state]
    }
}

fn mark_targets(size: usize, target: &[usize]) -> Result<Vec<bool>> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let mut mark = vec![false; size];
    for &s in target {
        if s >= size {
            return Err(Error::InvalidParameter(format!(
                "target state {s} out of range (size {size})"
            )));
        }
        mark[s] = true;
    }
    Ok(mark)
}

/// States from which the chain hits the target with probability < 1: those
/// that can reach a state with no path to the target without first passing
/// through the target.
fn infinite_states(m: &DMatrix<f64>, in_target: &[bool]) -> Vec<bool> {
    let n = m.nrows();
    let preds: Vec<Vec<usize>> = (0..n)
        .map(|y| (0..n).filter(|&x| m[(x, y)] > 0.0).collect())
        .collect();

    let mut reaches = in_target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&x| in_target[x]).collect();
    while let Some(y) = stack.pop() {
        for &x in &preds[y] {
            if !reaches[x] {
                reaches[x] = true;
                stack.push(x);
            }
        }
    }

    let mut inf: Vec<bool> = reaches.iter().map(|&r| !r).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&x| inf[x]).collect();
    while let Some(y) = stack.pop() {
        for &x in &preds[y] {
            if !inf[x] && !in_target[x] {
                inf[x] = true;
                stack.push(x);
            }
        }
    }
    inf
}

/// Minimal non-negative solution of the hitting-time system for a
/// row-stochastic `m` and a nonempty target set.
pub fn hitting_times(m: &DMatrix<f64>, target: &[usize]) -> Result<HittingResult> {
    let n = m.nrows();
    guard_size(n)?;
    let in_target = mark_targets(n, target)?;
    let inf = infinite_states(m, &in_target);

    let free: Vec<usize> = (0..n).filter(|&x| !in_target[x] && !inf[x]).collect();
    let mut values = vec![0.0; n];
    for x in 0..n {
        if inf[x] {
            values[x] = f64::INFINITY;
        }
    }
    let mut residual = 0.0;
    if !free.is_empty() {
        let k = free.len();
        let sys = DMatrix::from_fn(k, k, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - m[(free[i], free[j])]
        });
        let (h, _) = solve_refined(&sys, &DVector::from_element(k, 1.0))
            .map_err(|e| Error::Singular(format!("restricted hitting system: {e}")))?;
        for (i, &x) in free.iter().enumerate() {
            values[x] = h[i];
        }
        for &x in &free {
            let mut rhs = 1.0;
            for &y in &free {
                rhs += m[(x, y)] * values[y];
            }
            residual = f64::max(residual, (values[x] - rhs).abs());
        }
    }
    let mut target = target.to_vec();
    target.sort_unstable();
    target.dedup();
    Ok(HittingResult {
        target,
        reachable: values.iter().map(|v| v.is_finite()).collect(),
        values,
        residual,
    })
}

/// Radio hitting time of a vertex set from one start vertex.
#[derive(Debug, Clone, Serialize)]
pub struct RadioHitting {
    pub start: usize,
    pub target: Vec<usize>,
    /// Transmissions until some vertex of the target hears the walk.
    #[serde(with = "float_or_inf")]
    pub value: f64,
    /// `Σ_e λ₀(e) h_e^{E(U)}`: edge-process steps before entering `E(U)`.
    #[serde(with = "float_or_inf")]
    pub raw: f64,
    /// `E(U)`.
    pub heard_edges: Vec<usize>,
    /// `λ₀ = X(0) A`, the law of the first edge.
    pub lambda0: Vec<f64>,
    pub edge_hitting: HittingResult,
}

/// Radio hitting times of one target set from every start vertex.
#[derive(Debug, Clone, Serialize)]
pub struct RadioProfile {
    pub target: Vec<usize>,
    #[serde(with = "float_or_inf::vec")]
    pub values: Vec<f64>,
    #[serde(with = "float_or_inf::vec")]
    pub raw: Vec<f64>,
    pub heard_edges: Vec<usize>,
    pub edge_hitting: HittingResult,
}

/// Ordered-pair table `table[v][u]` with its maximum.
#[derive(Debug, Clone, Serialize)]
pub struct PairTable {
    #[serde(with = "float_or_inf::matrix")]
    pub values: Vec<Vec<f64>>,
}

/// A maximum over ordered pairs `(source, target)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPair {
    #[serde(with = "float_or_inf")]
    pub value: f64,
    pub source: usize,
    pub target: usize,
}

impl PairTable {
    /// Maximum entry; ties (within 1e-12 relative) go to the
    /// lexicographically smallest `(source, target)`.
    pub fn max_pair(&self) -> MaxPair {
        let mut best = MaxPair {
            value: f64::NEG_INFINITY,
            source: 0,
            target: 0,
        };
        for (s, row) in self.values.iter().enumerate() {
            for (t, &x) in row.iter().enumerate() {
                let margin = 1e-12 * best.value.abs().max(1.0);
                if x > best.value + margin || (best.value.is_infinite() && x > best.value) {
                    best = MaxPair {
                        value: x,
                        source: s,
                        target: t,
                    };
                }
            }
        }
        best
    }
}

/// Precomputed operators for repeated exact queries on one structure.
#[derive(Debug, Clone)]
pub struct Analyzer {
    model: WalkModel,
    entry: DMatrix<f64>,
    vertex_chain: DMatrix<f64>,
    edge_chain: DMatrix<f64>,
    irreducible: bool,
}

impl Analyzer {
    /// Needs a connected hyper-graph.
    pub fn undirected(h: &Hypergraph) -> Result<Self> {
        let ops = build_operators(h)?;
        Ok(Self {
            model: WalkModel::undirected(h),
            entry: ops.a,
            vertex_chain: ops.p,
            edge_chain: ops.q,
            irreducible: true,
        })
    }

    /// Needs every vertex to originate an arc. Reducible chains are accepted;
    /// unreachable targets then come back as infinite.
    pub fn directed(d: &DirectedHypergraph) -> Result<Self> {
        let ops = build_directed_operators(d)?;
        Ok(Self {
            model: WalkModel::directed(d),
            entry: ops.a_out,
            vertex_chain: ops.p,
            edge_chain: ops.q,
            irreducible: ops.irreducible,
        })
    }

    pub fn new(h: &AnyHypergraph) -> Result<Self> {
        match h {
            AnyHypergraph::Undirected(h) => Self::undirected(h),
            AnyHypergraph::Directed(d) => Self::directed(d),
        }
    }

    pub fn model(&self) -> &WalkModel {
        &self.model
    }

    pub fn vertex_count(&self) -> usize {
        self.model.vertex_count()
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// `P` (or `P'`).
    pub fn vertex_chain(&self) -> &DMatrix<f64> {
        &self.vertex_chain
    }

    /// `Q` (or `Q'`).
    pub fn edge_chain(&self) -> &DMatrix<f64> {
        &self.edge_chain
    }

    /// Ordinary hitting times of `target` for the vertex process.
    pub fn hitting(&self, target: &[usize]) -> Result<HittingResult> {
        hitting_times(&self.vertex_chain, target)
    }

    /// Radio hitting times of `target` from every start vertex.
    pub fn radio_profile(&self, target: &[usize]) -> Result<RadioProfile> {
        let n = self.vertex_count();
        let in_target = mark_targets(n, target)?;
        let heard = self.model.heard_edges(target);
        if heard.is_empty() {
            // nobody in the target can ever hear a transmission
            let values = (0..n)
                .map(|v| if in_target[v] { 0.0 } else { f64::INFINITY })
                .collect();
            return Ok(RadioProfile {
                target: target.to_vec(),
                values,
                raw: vec![f64::INFINITY; n],
                heard_edges: heard,
                edge_hitting: HittingResult {
                    target: Vec::new(),
                    values: vec![f64::INFINITY; self.model.edge_count()],
                    reachable: vec![false; self.model.edge_count()],
                    residual: 0.0,
                },
            });
        }
        let edge_hitting = hitting_times(&self.edge_chain, &heard)?;
        let mut raw = vec![0.0; n];
        for (v, r) in raw.iter_mut().enumerate() {
            for &e in self.model.out_edges(v) {
                let w = self.entry[(v, e)];
                if w > 0.0 {
                    *r += w * edge_hitting.values[e];
                }
            }
        }
        let values = (0..n)
            .map(|v| if in_target[v] { 0.0 } else { 1.0 + raw[v] })
            .collect();
        let mut target = target.to_vec();
        target.sort_unstable();
        target.dedup();
        Ok(RadioProfile {
            target,
            values,
            raw,
            heard_edges: heard,
            edge_hitting,
        })
    }

    pub fn radio_hitting(&self, start: usize, target: &[usize]) -> Result<RadioHitting> {
        let n = self.vertex_count();
        if start >= n {
            return Err(Error::InvalidParameter(format!(
                "start vertex {start} out of range (n = {n})"
            )));
        }
        let profile = self.radio_profile(target)?;
        Ok(RadioHitting {
            start,
            target: profile.target,
            value: profile.values[start],
            raw: profile.raw[start],
            heard_edges: profile.heard_edges,
            lambda0: self.entry.row(start).iter().copied().collect(),
            edge_hitting: profile.edge_hitting,
        })
    }

    /// `h(v, u)` for all ordered pairs, one solve per target.
    pub fn hitting_table(&self) -> Result<PairTable> {
        let n = self.vertex_count();
        let columns: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|u| self.hitting(&[u]).map(|r| r.values))
            .collect::<Result<_>>()?;
        Ok(transpose_columns(columns, n))
    }

    /// `h̃(v, u)` (and the raw values) for all ordered pairs.
    pub fn radio_tables(&self) -> Result<(PairTable, PairTable)> {
        let n = self.vertex_count();
        let cols: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|u| self.radio_profile(&[u]).map(|p| (p.values, p.raw)))
            .collect::<Result<_>>()?;
        let (vals, raws): (Vec<_>, Vec<_>) = cols.into_iter().unzip();
        Ok((transpose_columns(vals, n), transpose_columns(raws, n)))
    }

    pub fn max_hitting(&self) -> Result<MaxPair> {
        Ok(self.hitting_table()?.max_pair())
    }

    pub fn max_radio_hitting(&self) -> Result<MaxPair> {
        Ok(self.radio_tables()?.0.max_pair())
    }
}

fn transpose_columns(columns: Vec<Vec<f64>>, n: usize) -> PairTable {
    PairTable {
        values: (0..n)
            .map(|v| columns.iter().map(|col| col[v]).collect())
            .collect(),
    }
}

pub fn radio_hitting(h: &Hypergraph, start: usize, target: &[usize]) -> Result<RadioHitting> {
    Analyzer::undirected(h)?.radio_hitting(start, target)
}

pub fn radio_hitting_directed(
    r: &RadioHypergraph,
    start: usize,
    target: &[usize],
) -> Result<RadioHitting> {
    Analyzer::directed(r.as_directed())?.radio_hitting(start, target)
}

pub fn max_hitting(h: &Hypergraph) -> Result<MaxPair> {
    Analyzer::undirected(h)?.max_hitting()
}

pub fn max_radio_hitting(h: &Hypergraph) -> Result<MaxPair> {
    Analyzer::undirected(h)?.max_radio_hitting()
}
