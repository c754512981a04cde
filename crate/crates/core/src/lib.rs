//! Random walks on hyper-graphs.
//!
//! The vertex process picks an incident edge uniformly and then a vertex of
//! that edge uniformly; the coupled edge process records the edges used.
//! This crate builds the transition operators of both processes, solves exact
//! hitting and radio hitting times (a vertex "hears" the walk when a traversed
//! edge contains it), estimates cover and radio cover times by seeded
//! Monte-Carlo simulation, and checks closed-form cover-time bounds on
//! generated hyper-graph families.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod families;
pub mod graph;
pub mod hypergraph;
pub mod io;
pub mod linalg;
pub mod sim;
pub mod walk;

pub use error::{Error, Result};
pub use graph::Graph;
pub use hypergraph::{
    AnyHypergraph, Arc, BipartiteLift, Degrees, DirectedHypergraph, Hypergraph, RadioHypergraph,
};
pub use walk::{WalkModel, WalkOperators};
