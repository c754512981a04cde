//! Plain undirected (multi-)graphs: the 2-uniform special case, the carrier
//! of radio hyper-graphs, and the electrical network for resistance work.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hypergraph::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Parallel edges are kept; self-loops
    /// are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange {
                        edge: i,
                        vertex: x,
                        n,
                    });
                }
            }
            if u == v {
                return Err(Error::DuplicateVertex { edge: i, vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self { n, edges, adj })
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v)).collect()).expect("path is valid")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)).collect()).expect("cycle is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours with multiplicity.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacency_lists(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub(crate) fn first_parallel_edge(&self) -> Option<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .find(|&key| !seen.insert(key))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.groups()
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Non-lazy simple walk: `P(v,u) = mult(v,u) / deg(v)`.
    pub fn simple_walk_matrix(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.n, self.n);
        for (v, nbrs) in self.adj.iter().enumerate() {
            let w = 1.0 / nbrs.len() as f64;
            for &u in nbrs {
                p[(v, u)] += w;
            }
        }
        p
    }

    /// Walk that holds with probability 1/2, otherwise moves like the simple walk.
    pub fn lazy_walk_matrix(&self) -> DMatrix<f64> {
        let mut p = self.simple_walk_matrix() * 0.5;
        for v in 0..self.n {
            p[(v, v)] += 0.5;
        }
        p
    }

    /// Combinatorial Laplacian `D - A` with unit conductances.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            l[(u, u)] += 1.0;
            l[(v, v)] += 1.0;
            l[(u, v)] -= 1.0;
            l[(v, u)] -= 1.0;
        }
        l
    }

    pub(crate) fn adjacency_bits(&self) -> Vec<Vec<bool>> {
        let mut bits = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            bits[u][v] = true;
            bits[v][u] = true;
        }
        bits
    }
}
