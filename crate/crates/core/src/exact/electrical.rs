//! Effective resistance with unit resistors, and the commute-time and
//! Foster identities it satisfies.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{guard_size, solve_refined};

use super::hitting_times;

fn require_connected(g: &Graph) -> Result<()> {
    guard_size(g.vertex_count())?;
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    Ok(())
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} out of range (n = {})",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// `R_uv`: ground `v`, inject a unit current at `u`, read the potential at `u`.
pub fn effective_resistance(g: &Graph, u: usize, v: usize) -> Result<f64> {
    require_connected(g)?;
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if u == v {
        return Ok(0.0);
    }
    let n = g.vertex_count();
    let l = g.laplacian();
    let keep: Vec<usize> = (0..n).filter(|&x| x != v).collect();
    let reduced = DMatrix::from_fn(n - 1, n - 1, |i, j| l[(keep[i], keep[j])]);
    let pos = keep.iter().position(|&x| x == u).expect("u != v");
    let mut rhs = DVector::zeros(n - 1);
    rhs[pos] = 1.0;
    let (x, _) = solve_refined(&reduced, &rhs)?;
    Ok(x[pos])
}

/// All-pairs effective resistance from the Laplacian pseudo-inverse
/// `L⁺ = (L + J/n)⁻¹ − J/n`.
pub fn resistance_matrix(g: &Graph) -> Result<DMatrix<f64>> {
    require_connected(g)?;
    let n = g.vertex_count();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let inv = (g.laplacian() + &j)
        .try_inverse()
        .ok_or_else(|| Error::Singular("Laplacian pseudo-inverse".into()))?;
    let lp = inv - j;
    Ok(DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            0.0
        } else {
            lp[(a, a)] + lp[(b, b)] - 2.0 * lp[(a, b)]
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct CommuteReport {
    pub u: usize,
    pub v: usize,
    pub hitting_uv: f64,
    pub hitting_vu: f64,
    pub commute: f64,
    pub resistance: f64,
    pub edges: usize,
    /// `|commute − 2 m R_uv|`.
    pub residual: f64,
    pub pass: bool,
}

/// Tolerance for the commute identity.
pub const COMMUTE_TOL: f64 = 1e-8;

/// Compares the commute time of the non-lazy simple walk with `2 m R_uv`.
pub fn commute_check(g: &Graph, u: usize, v: usize) -> Result<CommuteReport> {
    let resistance = effective_resistance(g, u, v)?;
    let p = g.simple_walk_matrix();
    let hitting_uv = hitting_times(&p, &[v])?.values[u];
    let hitting_vu = hitting_times(&p, &[u])?.values[v];
    let commute = hitting_uv + hitting_vu;
    let m = g.edge_count();
    let residual = (commute - 2.0 * m as f64 * resistance).abs();
    Ok(CommuteReport {
        u,
        v,
        hitting_uv,
        hitting_vu,
        commute,
        resistance,
        edges: m,
        residual,
        pass: residual <= COMMUTE_TOL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FosterReport {
    pub sum: f64,
    pub expected: f64,
    pub residual: f64,
}

/// `Σ_{edges} R_uv`, which equals `n − 1` on a connected graph.
pub fn foster_sum(g: &Graph) -> Result<FosterReport> {
    let r = resistance_matrix(g)?;
    let sum: f64 = g.edges().iter().map(|&(u, v)| r[(u, v)]).sum();
    let expected = (g.vertex_count() - 1) as f64;
    Ok(FosterReport {
        sum,
        expected,
        residual: (sum - expected).abs(),
    })
}
