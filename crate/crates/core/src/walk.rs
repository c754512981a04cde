//! Transition operators of the vertex process `X(t)` and the edge process
//! `Y(t)`, their stationary laws, and numerical checks of the identities that
//! tie the two processes together.
//!
//! For an undirected hyper-graph with incidence matrix `W`:
//!
//! ```text
//! A = D_v⁻¹ W      (vertex -> edge: pick an incident edge uniformly)
//! B = D_e⁻¹ Wᵀ     (edge -> vertex: land uniformly inside the edge)
//! P = A B          (n × n, vertex process)
//! Q = B A          (m × m, edge process)
//! ```
//!
//! Directed hyper-graphs use the origin incidence for `A` and the
//! destination incidence for `B`, both row-normalised.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{AnyHypergraph, DirectedHypergraph, Hypergraph};
use crate::linalg::{self, guard_size, max_abs_diff};

/// Adjacency-list view of one walk step: from a vertex pick one of its
/// outgoing edges uniformly, then land uniformly on one of the edge's
/// landing vertices. `audience(e)` is the set of vertices that hear a
/// transmission on `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkModel {
    n: usize,
    out: Vec<Vec<usize>>,
    land: Vec<Vec<usize>>,
    audience: Vec<Vec<usize>>,
}

impl WalkModel {
    pub fn undirected(h: &Hypergraph) -> Self {
        let mut land: Vec<Vec<usize>> = h.edges().to_vec();
        for e in &mut land {
            e.sort_unstable();
        }
        Self {
            n: h.vertex_count(),
            out: h.incident_edges(),
            audience: land.clone(),
            land,
        }
    }

    /// Arcs are left from any origin vertex and land in the destination;
    /// origin and destination both hear the transmission.
    pub fn directed(d: &DirectedHypergraph) -> Self {
        let mut out = vec![Vec::new(); d.vertex_count()];
        for (j, a) in d.arcs().iter().enumerate() {
            for &v in &a.org {
                out[v].push(j);
            }
        }
        Self {
            n: d.vertex_count(),
            out,
            land: d
                .arcs()
                .iter()
                .map(|a| {
                    let mut l = a.dst.clone();
                    l.sort_unstable();
                    l
                })
                .collect(),
            audience: d.arcs().iter().map(|a| a.members()).collect(),
        }
    }

    pub fn of(h: &AnyHypergraph) -> Self {
        match h {
            AnyHypergraph::Undirected(h) => Self::undirected(h),
            AnyHypergraph::Directed(d) => Self::directed(d),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.land.len()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn landing(&self, e: usize) -> &[usize] {
        &self.land[e]
    }

    pub fn audience(&self, e: usize) -> &[usize] {
        &self.audience[e]
    }

    /// Largest audience; the rank for undirected hyper-graphs.
    pub fn rank(&self) -> usize {
        self.audience.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// First vertex with no outgoing edge, if any.
    pub fn first_stuck_vertex(&self) -> Option<usize> {
        self.out.iter().position(Vec::is_empty)
    }

    /// `E(U)`: edges whose audience meets `targets`.
    pub fn heard_edges(&self, targets: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; self.n];
        for &u in targets {
            mark[u] = true;
        }
        (0..self.edge_count())
            .filter(|&e| self.audience[e].iter().any(|&v| mark[v]))
            .collect()
    }

    /// Vertex-to-edge matrix (`A`, or `A⃗` for directed inputs).
    pub fn entry_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.edge_count());
        for (v, es) in self.out.iter().enumerate() {
            let w = 1.0 / es.len() as f64;
            for &e in es {
                a[(v, e)] += w;
            }
        }
        a
    }

    /// Edge-to-vertex matrix (`B`, or `B⃖` for directed inputs).
    pub fn exit_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.edge_count(), self.n);
        for (e, vs) in self.land.iter().enumerate() {
            let w = 1.0 / vs.len() as f64;
            for &v in vs {
                b[(e, v)] += w;
            }
        }
        b
    }
}

/// Transition operators and stationary laws of an undirected hyper-graph.
#[derive(Debug, Clone)]
pub struct WalkOperators {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub pi: DVector<f64>,
    pub zeta: DVector<f64>,
}

fn check_walkable(h: &Hypergraph) -> Result<()> {
    if h.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    guard_size(h.vertex_count() + h.edge_count())?;
    if let Some(v) = h.degrees().vertex.iter().position(|&d| d == 0) {
        return Err(Error::ZeroDegree(v));
    }
    if !h.is_connected() {
        return Err(Error::Disconnected(h.components()));
    }
    Ok(())
}

/// Builds `A`, `B`, `P`, `Q`, `π`, `ζ` from the incidence matrix.
pub fn build_operators(h: &Hypergraph) -> Result<WalkOperators> {
    check_walkable(h)?;
    let w = h.incidence_matrix();
    let deg = h.degrees();
    let dv_inv =
        DVector::from_iterator(h.vertex_count(), deg.vertex.iter().map(|&d| 1.0 / d as f64));
    let de_inv = DVector::from_iterator(h.edge_count(), deg.edge.iter().map(|&d| 1.0 / d as f64));

    let a = DMatrix::from_diagonal(&dv_inv) * &w;
    let b = DMatrix::from_diagonal(&de_inv) * w.transpose();
    let p = &a * &b;
    let q = &b * &a;
    let (pi, zeta) = stationary_from_degrees(&deg.vertex, &deg.edge);
    Ok(WalkOperators {
        a,
        b,
        p,
        q,
        pi,
        zeta,
    })
}

fn stationary_from_degrees(vertex: &[usize], edge: &[usize]) -> (DVector<f64>, DVector<f64>) {
    let vol = vertex.iter().sum::<usize>() as f64;
    (
        DVector::from_iterator(vertex.len(), vertex.iter().map(|&d| d as f64 / vol)),
        DVector::from_iterator(edge.len(), edge.iter().map(|&d| d as f64 / vol)),
    )
}

/// `π = d / Vol(V)` and `ζ = δ / Vol(E)`.
pub fn stationary(h: &Hypergraph) -> Result<(DVector<f64>, DVector<f64>)> {
    check_walkable(h)?;
    let deg = h.degrees();
    Ok(stationary_from_degrees(&deg.vertex, &deg.edge))
}

/// Operators of a directed hyper-graph.
#[derive(Debug, Clone)]
pub struct DirectedWalkOperators {
    /// `A⃗ = D⃗_v⁻¹ W⃗`.
    pub a_out: DMatrix<f64>,
    /// `B⃖ = D⃖_e⁻¹ W⃖ᵀ`.
    pub b_in: DMatrix<f64>,
    /// `P' = A⃗ B⃖`.
    pub p: DMatrix<f64>,
    /// `Q' = B⃖ A⃗`.
    pub q: DMatrix<f64>,
    /// Whether the chain on `P'` is irreducible. Reducible chains are still
    /// usable; hitting systems then mark unreachable states.
    pub irreducible: bool,
}

pub fn build_directed_operators(d: &DirectedHypergraph) -> Result<DirectedWalkOperators> {
    if d.arc_count() == 0 {
        return Err(Error::NoEdges);
    }
    guard_size(d.vertex_count() + d.arc_count())?;
    if let Some(v) = d.out_degrees().iter().position(|&x| x == 0) {
        return Err(Error::ZeroDegree(v));
    }
    let mut a_out = d.origin_incidence();
    linalg::normalize_rows(&mut a_out);
    let mut b_in = d.destination_incidence().transpose();
    linalg::normalize_rows(&mut b_in);
    let p = &a_out * &b_in;
    let q = &b_in * &a_out;
    let irreducible = is_irreducible(&p);
    Ok(DirectedWalkOperators {
        a_out,
        b_in,
        p,
        q,
        irreducible,
    })
}

/// Strong connectivity of the support of a square matrix.
pub fn is_irreducible(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                let w = if forward { m[(x, y)] } else { m[(y, x)] };
                if w > 0.0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reach(true) && reach(false)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub check: String,
    pub steps: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `Pᵗ = A Q^{t-1} B` and `Qᵗ = B P^{t-1} A` for every basis start,
/// i.e. as matrix identities.
pub fn coupling_check(h: &Hypergraph, t: usize, tol: f64) -> Result<DeviationReport> {
    if t == 0 {
        return Err(Error::InvalidParameter(
            "coupling_check needs t >= 1".into(),
        ));
    }
    let ops = build_operators(h)?;
    let pt = linalg::power(&ops.p, t - 1);
    let qt = linalg::power(&ops.q, t - 1);
    let lhs_x = &pt * &ops.p;
    let rhs_x = &ops.a * &qt * &ops.b;
    let lhs_y = &qt * &ops.q;
    let rhs_y = &ops.b * &pt * &ops.a;
    let dev = max_abs_diff(&lhs_x, &rhs_x).max(max_abs_diff(&lhs_y, &rhs_y));
    Ok(DeviationReport {
        check: "coupling".into(),
        steps: t,
        max_deviation: dev,
        tolerance: tol,
        pass: dev <= tol,
    })
}

/// Checks that `2t` steps of the simple walk on the bipartite lift reproduce
/// `t` steps of `X` on the vertex block and of `Y` on the edge block.
pub fn lift_walk_check(h: &Hypergraph, t: usize, tol: f64) -> Result<DeviationReport> {
    if t == 0 {
        return Err(Error::InvalidParameter(
            "lift_walk_check needs t >= 1".into(),
        ));
    }
    let ops = build_operators(h)?;
    let (n, m) = (h.vertex_count(), h.edge_count());
    let pb = h.bipartite_lift().transition_matrix();
    let z = linalg::power(&pb, 2 * t);
    let pt = linalg::power(&ops.p, t);
    let qt = linalg::power(&ops.q, t);
    let dev_v = max_abs_diff(&z.view((0, 0), (n, n)).into_owned(), &pt);
    let dev_e = max_abs_diff(&z.view((n, n), (m, m)).into_owned(), &qt);
    // odd powers cannot leave the bipartition, so the off-diagonal blocks vanish
    let off = z
        .view((0, n), (n, m))
        .amax()
        .max(z.view((n, 0), (m, n)).amax());
    let dev = dev_v.max(dev_e).max(off);
    Ok(DeviationReport {
        check: "lift".into(),
        steps: t,
        max_deviation: dev,
        tolerance: tol,
        pass: dev <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Nonzero eigenvalues of `P`, ascending.
    pub p_nonzero: Vec<f64>,
    /// Nonzero eigenvalues of `Q`, ascending.
    pub q_nonzero: Vec<f64>,
    /// Largest distance in the greedy nearest pairing (`inf` if counts differ).
    #[serde(with = "crate::io::float_or_inf")]
    pub max_pairing_distance: f64,
    /// How far the π-symmetrised operators are from symmetric.
    pub asymmetry: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Eigenvalues of a chain reversible with respect to `weights`, from the
/// similar symmetric matrix `D^{1/2} M D^{-1/2}`. Returns the eigenvalues
/// and the asymmetry of the similarity transform.
pub fn reversible_eigenvalues(m: &DMatrix<f64>, weights: &DVector<f64>) -> (Vec<f64>, f64) {
    let n = m.nrows();
    let s = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * (weights[i] / weights[j]).sqrt());
    let asym = max_abs_diff(&s, &s.transpose());
    let sym = (&s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    (ev, asym)
}

/// Greedy nearest pairing of two eigenvalue lists sorted ascending. Returns
/// the largest pair distance, or infinity when the lengths differ.
pub fn pair_spectra(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (x - y).abs()))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .expect("lengths match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Compares the nonzero spectra of `P` and `Q`. An eigenvalue counts as
/// nonzero when `|λ| > tol · ρ` with `ρ` the spectral radius.
pub fn spectrum_check(h: &Hypergraph, tol: f64) -> Result<SpectrumReport> {
    let ops = build_operators(h)?;
    let (pe, pa) = reversible_eigenvalues(&ops.p, &ops.pi);
    let (qe, qa) = reversible_eigenvalues(&ops.q, &ops.zeta);
    let rho = pe.iter().chain(&qe).fold(0.0f64, |acc, x| acc.max(x.abs()));
    let keep =
        |v: Vec<f64>| -> Vec<f64> { v.into_iter().filter(|x| x.abs() > tol * rho).collect() };
    let (p_nonzero, q_nonzero) = (keep(pe), keep(qe));
    let dist = pair_spectra(&p_nonzero, &q_nonzero);
    Ok(SpectrumReport {
        pass: dist <= tol,
        p_nonzero,
        q_nonzero,
        max_pairing_distance: dist,
        asymmetry: pa.max(qa),
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::hypergraph::RadioHypergraph;

    fn p3() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        let d = max_abs_diff(a, b);
        assert!(d <= tol, "deviation {d}\n{a}\n{b}");
    }

    /// `P(v,u) = (1/d(v)) Σ_{e ∋ v,u} 1/δ(e)`, by direct enumeration.
    fn p_by_enumeration(h: &Hypergraph) -> DMatrix<f64> {
        let n = h.vertex_count();
        let deg = h.degrees();
        DMatrix::from_fn(n, n, |v, u| {
            h.edges()
                .iter()
                .filter(|e| e.contains(&v) && e.contains(&u))
                .map(|e| 1.0 / e.len() as f64)
                .sum::<f64>()
                / deg.vertex[v] as f64
        })
    }

    #[test]
    fn p3_operators_match_hand_values() {
        let ops = build_operators(&p3()).unwrap();
        let p = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0., 0.25, 0.5, 0.25, 0., 0.5, 0.5]);
        let q = DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]);
        assert_close(&ops.p, &p, 1e-12);
        assert_close(&ops.q, &q, 1e-12);
        assert_close(&ops.p, &p_by_enumeration(&p3()), 1e-15);
        assert_eq!(ops.pi.as_slice(), &[0.25, 0.5, 0.25]);
        assert_eq!(ops.zeta.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn single_edge_is_uniform() {
        let h = Hypergraph::new(5, vec![(0..5).collect()]).unwrap();
        let ops = build_operators(&h).unwrap();
        assert_close(&ops.p, &DMatrix::from_element(5, 5, 0.2), 1e-15);
        assert_eq!(ops.pi.as_slice(), &[0.2; 5]);
    }

    #[test]
    fn stationary_of_window_line() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let (pi, zeta) = stationary(&h).unwrap();
        let expect = [1., 2., 3., 2., 1.].map(|x| x / 9.0);
        for (a, b) in pi.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let ops = build_operators(&h).unwrap();
        assert!((pi.transpose() * &ops.p - pi.transpose()).amax() < 1e-10);
        assert!((zeta.transpose() * &ops.q - zeta.transpose()).amax() < 1e-10);
    }

    #[test]
    fn construction_errors() {
        let split = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            build_operators(&split),
            Err(Error::Disconnected(_))
        ));
        let lonely = Hypergraph::new(3, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            build_operators(&lonely),
            Err(Error::ZeroDegree(2))
        ));
        let none = Hypergraph::new(2, vec![]).unwrap();
        assert!(matches!(build_operators(&none), Err(Error::NoEdges)));
    }

    #[test]
    fn radio_operators_are_simple_walks() {
        let tri = RadioHypergraph::from_graph(&Graph::complete(3)).unwrap();
        let ops = build_directed_operators(tri.as_directed()).unwrap();
        let k3 = DMatrix::from_row_slice(3, 3, &[0., 0.5, 0.5, 0.5, 0., 0.5, 0.5, 0.5, 0.]);
        assert_close(&ops.p, &k3, 0.0);
        assert!(ops.irreducible);

        let path = RadioHypergraph::from_graph(&Graph::path(3)).unwrap();
        let ops = build_directed_operators(path.as_directed()).unwrap();
        let p = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 0.5, 0., 0.5, 0., 1., 0.]);
        assert_close(&ops.p, &p, 0.0);
        assert!(linalg::row_stochastic_error(&ops.q) < 1e-15);
    }

    #[test]
    fn directed_reducible_chain_is_flagged() {
        use crate::hypergraph::Arc;
        let d = DirectedHypergraph::new(
            2,
            vec![
                Arc {
                    org: vec![0],
                    dst: vec![1],
                },
                Arc {
                    org: vec![1],
                    dst: vec![1],
                },
            ],
        )
        .unwrap();
        let ops = build_directed_operators(&d).unwrap();
        assert!(!ops.irreducible);

        let stuck = DirectedHypergraph::new(
            2,
            vec![Arc {
                org: vec![0],
                dst: vec![1],
            }],
        )
        .unwrap();
        assert!(matches!(
            build_directed_operators(&stuck),
            Err(Error::ZeroDegree(1))
        ));
    }

    #[test]
    fn coupling_and_lift_on_small_cases() {
        let r = coupling_check(&p3(), 1, 0.0).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(coupling_check(&p3(), 5, 1e-12).unwrap().pass);
        assert!(lift_walk_check(&p3(), 1, 1e-12).unwrap().pass);
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(lift_walk_check(&single, 3, 1e-12).unwrap().pass);
        assert!(coupling_check(&p3(), 0, 1e-12).is_err());
    }

    #[test]
    fn spectra_of_small_cases() {
        let r = spectrum_check(&p3(), 1e-8).unwrap();
        assert!(r.pass);
        assert_eq!(r.p_nonzero.len(), 2);
        assert!((r.p_nonzero[0] - 0.5).abs() < 1e-12 && (r.p_nonzero[1] - 1.0).abs() < 1e-12);

        let single = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let r = spectrum_check(&single, 1e-8).unwrap();
        assert_eq!(r.p_nonzero.len(), 1);
        assert_eq!(r.q_nonzero.len(), 1);
        assert!(r.pass);
    }

    #[test]
    fn pairing_counts_must_match() {
        assert_eq!(pair_spectra(&[1.0], &[1.0, 0.5]), f64::INFINITY);
        assert!((pair_spectra(&[0.5, 1.0], &[0.5 + 1e-9, 1.0]) - 1e-9).abs() < 1e-15);
    }
}
