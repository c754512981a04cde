//! Generators for the hyper-graph families under study, random instances,
//! and unit-disk ingestion.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hypergraph::{AnyHypergraph, Arc, DirectedHypergraph, Hypergraph, RadioHypergraph};

/// Largest number of clique edges `clique_line` will enumerate.
pub const CLIQUE_EDGE_CAP: u64 = 100_000;

/// Attempts before `random_uniform` gives up on connectivity.
pub const MAX_RETRIES: usize = 1000;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// `k`-uniform hyperline: windows `{i, …, i+k−1}` for `i = 0 … n−k`.
pub fn hyperline(n: usize, k: usize) -> Result<Hypergraph> {
    if k < 2 || k > n {
        return Err(invalid(format!(
            "hyperline needs 2 <= k <= n, got n={n}, k={k}"
        )));
    }
    Hypergraph::new(n, (0..=n - k).map(|i| (i..i + k).collect()).collect())
}

/// `k`-hop radio line: one arc per vertex reaching every vertex within
/// distance `k` (circular when `ring`, clipped at the ends otherwise).
pub fn radio_line(n: usize, k: usize, ring: bool) -> Result<RadioHypergraph> {
    if k < 1 || 2 * k >= n {
        return Err(invalid(format!(
            "radio_line needs 1 <= k < n/2, got n={n}, k={k}"
        )));
    }
    let arcs = (0..n)
        .map(|v| {
            let mut dst: Vec<usize> = (0..n)
                .filter(|&u| {
                    let d = v.abs_diff(u);
                    let d = if ring { d.min(n - d) } else { d };
                    d >= 1 && d <= k
                })
                .collect();
            dst.sort_unstable();
            Arc { org: vec![v], dst }
        })
        .collect();
    RadioHypergraph::try_from(DirectedHypergraph::new(n, arcs)?)
}

/// Torus distance along one axis.
fn ring_distance(a: usize, b: usize, side: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(side - d)
}

/// `side × side` torus where each node's arc reaches every node at L1 torus
/// distance `1..=k`. Node `(x, y)` has index `y·side + x`.
pub fn mesh2d(side: usize, k: usize) -> Result<RadioHypergraph> {
    if side < 3 || k < 1 || 2 * k >= side {
        return Err(invalid(format!(
            "mesh2d needs side >= 3 and 1 <= k < side/2, got side={side}, k={k}"
        )));
    }
    let n = side * side;
    let expected = 2 * k * (k + 1);
    let mut arcs = Vec::with_capacity(n);
    for v in 0..n {
        let (vx, vy) = (v % side, v / side);
        let dst: Vec<usize> = (0..n)
            .filter(|&u| {
                let d = ring_distance(vx, u % side, side) + ring_distance(vy, u / side, side);
                d >= 1 && d <= k
            })
            .collect();
        assert_eq!(dst.len(), expected, "torus ball size");
        arcs.push(Arc { org: vec![v], dst });
    }
    RadioHypergraph::try_from(DirectedHypergraph::new(n, arcs)?)
}

/// One hyper-edge holding every vertex.
pub fn single_edge(n: usize) -> Result<Hypergraph> {
    if n == 0 {
        return Err(invalid("single_edge needs n >= 1"));
    }
    Hypergraph::new(n, vec![(0..n).collect()])
}

/// Every node's arc reaches every other node.
pub fn complete_broadcast(n: usize) -> Result<RadioHypergraph> {
    if n < 2 {
        return Err(invalid("complete_broadcast needs n >= 2"));
    }
    RadioHypergraph::from_graph(&Graph::complete(n))
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All `c`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..c).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..c).rev().find(|&i| idx[i] < n - c + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..c {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Uniform hyper-clique on `0..n′` (all `c`-subsets) joined at vertex 0 to a
/// path of `n′ − 1` new vertices `n′ … 2n′−2`; the far end is `2n′ − 2`.
pub fn clique_line(n_prime: usize, c: usize) -> Result<Hypergraph> {
    if c < 2 || c > n_prime {
        return Err(invalid(format!(
            "clique_line needs 2 <= c <= n', got n'={n_prime}, c={c}"
        )));
    }
    let count = binomial(n_prime as u64, c as u64);
    if count > CLIQUE_EDGE_CAP {
        return Err(Error::TooLarge {
            size: count as usize,
            cap: CLIQUE_EDGE_CAP as usize,
        });
    }
    let n = 2 * n_prime - 1;
    let mut edges = subsets(n_prime, c);
    let mut prev = 0;
    for v in n_prime..n {
        edges.push(vec![prev, v]);
        prev = v;
    }
    Hypergraph::new(n, edges)
}

/// Far end of the line part of [`clique_line`].
pub fn clique_line_far_end(n_prime: usize) -> usize {
    2 * n_prime - 2
}

/// Radio hyper-graph of the unit-disk graph: points within `radius` of each
/// other hear each other.
pub fn unit_disk(points: &[(f64, f64)], radius: f64) -> Result<RadioHypergraph> {
    if points.len() < 2 {
        return Err(invalid("unit_disk needs at least 2 points"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let mut edges = Vec::new();
    for (i, &(xi, yi)) in points.iter().enumerate() {
        for (j, &(xj, yj)) in points.iter().enumerate().skip(i + 1) {
            if (xi - xj).hypot(yi - yj) <= radius {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::new(points.len(), edges)?;
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    RadioHypergraph::from_graph(&g)
}

/// `m` uniform random `k`-subsets of `0..n`, resampled until connected.
pub fn random_uniform(n: usize, m: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    if k == 0 || k > n {
        return Err(invalid(format!(
            "random_uniform needs 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    if m == 0 {
        return Err(invalid("random_uniform needs m >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let edges = (0..m)
            .map(|_| {
                let mut e = sample(&mut rng, n, k).into_vec();
                e.sort_unstable();
                e
            })
            .collect();
        let h = Hypergraph::new(n, edges)?;
        if h.is_connected() {
            return Ok(h);
        }
    }
    Err(invalid(format!(
        "no connected instance of random_uniform({n}, {m}, {k}) after {MAX_RETRIES} draws"
    )))
}

/// Random simple connected graph: a random recursive tree plus every other
/// pair independently with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(invalid("random_connected_graph needs n >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![vec![false; n]; n];
    for v in 1..n {
        let u = rng.random_range(0..v);
        adj[u][v] = true;
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] || rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// A family member with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Hyperline {
        n: usize,
        k: usize,
    },
    RadioLine {
        n: usize,
        k: usize,
        ring: bool,
    },
    Mesh2d {
        side: usize,
        k: usize,
    },
    SingleEdge {
        n: usize,
    },
    CompleteBroadcast {
        n: usize,
    },
    CliqueLine {
        n_prime: usize,
        c: usize,
    },
    RandomUniform {
        n: usize,
        m: usize,
        k: usize,
        seed: u64,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<AnyHypergraph> {
        Ok(match *self {
            FamilySpec::Hyperline { n, k } => hyperline(n, k)?.into(),
            FamilySpec::RadioLine { n, k, ring } => radio_line(n, k, ring)?.into(),
            FamilySpec::Mesh2d { side, k } => mesh2d(side, k)?.into(),
            FamilySpec::SingleEdge { n } => single_edge(n)?.into(),
            FamilySpec::CompleteBroadcast { n } => complete_broadcast(n)?.into(),
            FamilySpec::CliqueLine { n_prime, c } => clique_line(n_prime, c)?.into(),
            FamilySpec::RandomUniform { n, m, k, seed } => random_uniform(n, m, k, seed)?.into(),
        })
    }

    /// Short label such as `hyperline(5,3)`.
    pub fn label(&self) -> String {
        match *self {
            FamilySpec::Hyperline { n, k } => format!("hyperline({n},{k})"),
            FamilySpec::RadioLine { n, k, ring } => {
                format!("radio_line({n},{k},{})", if ring { "ring" } else { "line" })
            }
            FamilySpec::Mesh2d { side, k } => format!("mesh2d({side},{k})"),
            FamilySpec::SingleEdge { n } => format!("single_edge({n})"),
            FamilySpec::CompleteBroadcast { n } => format!("complete_broadcast({n})"),
            FamilySpec::CliqueLine { n_prime, c } => format!("clique_line({n_prime},{c})"),
            FamilySpec::RandomUniform { n, m, k, seed } => {
                format!("random_uniform({n},{m},{k},{seed})")
            }
        }
    }
}

/// The instances the bound suite runs over by default.
pub fn default_grid() -> Vec<FamilySpec> {
    use FamilySpec::*;
    vec![
        Hyperline { n: 3, k: 2 },
        Hyperline { n: 5, k: 3 },
        Hyperline { n: 12, k: 3 },
        Hyperline { n: 20, k: 4 },
        SingleEdge { n: 4 },
        SingleEdge { n: 16 },
        RadioLine {
            n: 12,
            k: 2,
            ring: true,
        },
        RadioLine {
            n: 12,
            k: 2,
            ring: false,
        },
        RadioLine {
            n: 20,
            k: 3,
            ring: true,
        },
        Mesh2d { side: 5, k: 1 },
        Mesh2d { side: 5, k: 2 },
        Mesh2d { side: 7, k: 2 },
        CompleteBroadcast { n: 6 },
        CliqueLine { n_prime: 4, c: 2 },
        CliqueLine { n_prime: 6, c: 3 },
        RandomUniform {
            n: 12,
            m: 8,
            k: 3,
            seed: 1,
        },
        RandomUniform {
            n: 20,
            m: 12,
            k: 4,
            seed: 2,
        },
    ]
}
