//! Minimum triangle edge transversal toolkit: exact solvers, gadget and
//! lower-bound graph generators, a synchronous round simulator, and
//! distributed approximation algorithms.

pub mod carving;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod iso;
pub mod lbgraph;
pub mod mhvc;
mod hitting;
pub mod oracle;
pub mod simnet;
pub mod verify;

pub use error::{GraphError, OracleError, SimError};
pub use graph::{Ball, Edge, EdgeSet, Graph, GraphJson, Hypergraph, NodeId, ReducedHypergraph, Triangle, Weight};
