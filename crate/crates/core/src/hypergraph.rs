//! Hyper-graph data model.
//!
//! Vertices are the indices `0..n`. Undirected edges are vertex sets; directed
//! arcs are `(org, dst)` pairs of vertex sets. Duplicate edges are allowed, so
//! every structure here is really a multi-hyper-graph.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Undirected hyper-graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

/// Vertex degrees `d(v)`, edge cardinalities `δ(e)` and the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
    pub rank: usize,
}

impl Degrees {
    /// `Vol(V) = Σ d(v)`, which always equals `Vol(E) = Σ δ(e)`.
    pub fn volume(&self) -> usize {
        self.vertex.iter().sum()
    }
}

fn validate_set(set: &[usize], n: usize, edge: usize, what: &'static str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyEdge { edge, what });
    }
    let mut seen = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { edge, vertex: v, n });
        }
        if seen[v] {
            return Err(Error::DuplicateVertex { edge, vertex: v });
        }
        seen[v] = true;
    }
    Ok(())
}

fn validate_labels(labels: &Option<Vec<String>>, n: usize) -> Result<()> {
    match labels {
        Some(l) if l.len() != n => Err(Error::Malformed(format!(
            "labels has length {} but n = {}",
            l.len(),
            n
        ))),
        _ => Ok(()),
    }
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            validate_set(e, n, i, "edge")?;
        }
        Ok(Self {
            n,
            edges,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        let labels = Some(labels);
        validate_labels(&labels, self.n)?;
        self.labels = labels;
        Ok(self)
    }

    /// The 2-uniform hyper-graph with one edge per graph edge.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        Self::new(
            g.vertex_count(),
            g.edges().iter().map(|&(u, v)| vec![u, v]).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `r(H)`, the largest edge cardinality (0 when there are no edges).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `n × m` 0/1 matrix with `w[v][e] = 1` iff `v ∈ e`.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            for &v in e {
                w[(v, j)] = 1.0;
            }
        }
        w
    }

    pub fn degrees(&self) -> Degrees {
        let mut vertex = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                vertex[v] += 1;
            }
        }
        Degrees {
            vertex,
            edge: self.edges.iter().map(Vec::len).collect(),
            rank: self.rank(),
        }
    }

    /// `E(v)` for every vertex, edges listed in increasing index order.
    pub fn incident_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (j, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(j);
            }
        }
        inc
    }

    /// `N(v)`: vertices other than `v` sharing an edge with it, sorted.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.contains(&v))
            .flat_map(|e| e.iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Connected components of the vertex set, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges {
            for w in e.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.groups()
    }

    /// True iff the bipartite lift is a single component. Needs at least one
    /// vertex and one edge, and no vertex outside every edge.
    pub fn is_connected(&self) -> bool {
        self.n > 0 && !self.edges.is_empty() && self.components().len() == 1
    }

    pub fn bipartite_lift(&self) -> BipartiteLift {
        let mut links = Vec::with_capacity(self.edges.iter().map(Vec::len).sum());
        for (j, e) in self.edges.iter().enumerate() {
            for &v in e {
                links.push((v, j));
            }
        }
        BipartiteLift {
            vertices: self.n,
            edges: self.edges.len(),
            links,
        }
    }
}

/// A hyper-arc with origin and destination sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub org: Vec<usize>,
    pub dst: Vec<usize>,
}

impl Arc {
    /// Every vertex touched by a transmission on this arc.
    pub fn members(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.org.iter().chain(&self.dst).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedHypergraph {
    n: usize,
    arcs: Vec<Arc>,
    labels: Option<Vec<String>>,
}

impl DirectedHypergraph {
    pub fn new(n: usize, arcs: Vec<Arc>) -> Result<Self> {
        for (i, a) in arcs.iter().enumerate() {
            validate_set(&a.org, n, i, "origin")?;
            validate_set(&a.dst, n, i, "destination")?;
        }
        Ok(Self {
            n,
            arcs,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        let labels = Some(labels);
        validate_labels(&labels, self.n)?;
        self.labels = labels;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `W⃗`: `n × m` with a 1 where `v ∈ Org(e)`.
    pub fn origin_incidence(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.arcs.len());
        for (j, a) in self.arcs.iter().enumerate() {
            for &v in &a.org {
                w[(v, j)] = 1.0;
            }
        }
        w
    }

    /// `W⃖`: `n × m` with a 1 where `v ∈ Dst(e)`.
    pub fn destination_incidence(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.arcs.len());
        for (j, a) in self.arcs.iter().enumerate() {
            for &v in &a.dst {
                w[(v, j)] = 1.0;
            }
        }
        w
    }

    /// Out-degree `d⃗(v)`: number of arcs whose origin contains `v`.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for a in &self.arcs {
            for &v in &a.org {
                d[v] += 1;
            }
        }
        d
    }

    /// Largest `|Org(e) ∪ Dst(e)|`.
    pub fn rank(&self) -> usize {
        self.arcs
            .iter()
            .map(|a| a.members().len())
            .max()
            .unwrap_or(0)
    }

    /// Components of the underlying undirected structure.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for a in &self.arcs {
            let m = a.members();
            for w in m.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.groups()
    }
}

/// Directed hyper-graph whose arcs each have a single origin outside the
/// destination set: one transmitter, many receivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadioHypergraph(DirectedHypergraph);

impl TryFrom<DirectedHypergraph> for RadioHypergraph {
    type Error = Error;

    fn try_from(d: DirectedHypergraph) -> Result<Self> {
        for (i, a) in d.arcs.iter().enumerate() {
            if a.org.len() != 1 || a.dst.contains(&a.org[0]) {
                return Err(Error::NotRadio { arc: i });
            }
        }
        Ok(Self(d))
    }
}

impl RadioHypergraph {
    /// One arc per vertex `v` with `org = {v}` and `dst = N(v)`.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        if let Some((u, v)) = g.first_parallel_edge() {
            return Err(Error::InvalidParameter(format!(
                "graph must be simple; edge {{{u},{v}}} is repeated"
            )));
        }
        let mut arcs = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let mut dst = g.neighbors(v).to_vec();
            if dst.is_empty() {
                return Err(Error::IsolatedVertex(v));
            }
            dst.sort_unstable();
            arcs.push(Arc { org: vec![v], dst });
        }
        Ok(Self(DirectedHypergraph::new(g.vertex_count(), arcs)?))
    }

    /// Origin of arc `e`.
    pub fn transmitter(&self, e: usize) -> usize {
        self.0.arcs[e].org[0]
    }

    pub fn as_directed(&self) -> &DirectedHypergraph {
        &self.0
    }

    pub fn into_directed(self) -> DirectedHypergraph {
        self.0
    }

    pub fn vertex_count(&self) -> usize {
        self.0.n
    }

    pub fn arc_count(&self) -> usize {
        self.0.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.0.arcs
    }

    /// Undirected graph linking each transmitter to its receivers, when the
    /// reception relation is symmetric (otherwise `None`).
    pub fn reception_graph(&self) -> Option<Graph> {
        let n = self.0.n;
        let mut adj = vec![vec![false; n]; n];
        for a in &self.0.arcs {
            for &u in &a.dst {
                adj[a.org[0]][u] = true;
            }
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if adj[u][v] != adj[v][u] {
                    return None;
                }
                if adj[u][v] {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges).ok()
    }
}

/// Bipartite graph on `V ∪ E` with `(v, e)` linked iff `v ∈ e`.
///
/// Nodes `0..n` are hyper-graph vertices, `n..n+m` are hyper-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteLift {
    pub vertices: usize,
    pub edges: usize,
    /// `(vertex, edge)` pairs, edge indices relative to the right part.
    pub links: Vec<(usize, usize)>,
}

impl BipartiteLift {
    pub fn node_count(&self) -> usize {
        self.vertices + self.edges
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(v, e) in &self.links {
            adj[v].push(self.vertices + e);
            adj[self.vertices + e].push(v);
        }
        adj
    }

    /// Breadth-first connectivity over all `n + m` nodes.
    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let total = adj.len();
        if total == 0 {
            return false;
        }
        let mut seen = vec![false; total];
        let mut queue = std::collections::VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == total
    }

    /// Simple-walk transition matrix on the lift, `[[0, A], [B, 0]]`.
    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let adj = self.adjacency();
        let total = adj.len();
        let mut p = DMatrix::zeros(total, total);
        for (x, row) in adj.iter().enumerate() {
            let w = 1.0 / row.len() as f64;
            for &y in row {
                p[(x, y)] += w;
            }
        }
        p
    }
}

/// Either kind of hyper-graph, as read from a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyHypergraph {
    Undirected(Hypergraph),
    Directed(DirectedHypergraph),
}

impl AnyHypergraph {
    pub fn vertex_count(&self) -> usize {
        match self {
            Self::Undirected(h) => h.vertex_count(),
            Self::Directed(d) => d.vertex_count(),
        }
    }

    /// Number of edges or arcs.
    pub fn edge_count(&self) -> usize {
        match self {
            Self::Undirected(h) => h.edge_count(),
            Self::Directed(d) => d.arc_count(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Undirected(h) => h.rank(),
            Self::Directed(d) => d.rank(),
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, Self::Directed(_))
    }
}

impl From<Hypergraph> for AnyHypergraph {
    fn from(h: Hypergraph) -> Self {
        Self::Undirected(h)
    }
}

impl From<DirectedHypergraph> for AnyHypergraph {
    fn from(d: DirectedHypergraph) -> Self {
        Self::Directed(d)
    }
}

impl From<RadioHypergraph> for AnyHypergraph {
    fn from(r: RadioHypergraph) -> Self {
        Self::Directed(r.into_directed())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].push(v);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}
