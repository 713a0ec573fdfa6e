use thiserror::Error;

use crate::graph::{Edge, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("edge {0} has non-positive weight")]
    NonPositiveWeight(Edge),
    #[error("hypergraph node weight {0} is not positive")]
    NonPositiveNodeWeight(Weight),
    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),
    #[error("{0} is not an edge of the graph")]
    NotAnEdge(Edge),
    #[error("cannot parse weight {0:?}")]
    BadWeight(String),
    #[error("{edges} edges but {weights} weights")]
    WeightCount { edges: usize, weights: usize },
    #[error("label key {0:?} is not a node id")]
    BadLabelKey(String),
    #[error("invalid graph json: {0}")]
    Json(String),
    #[error("ball of {size} nodes exceeds the isomorphism limit of {limit}")]
    BallTooLarge { size: usize, limit: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{sets} triangles/hyperedges exceed the budget of {budget}")]
    BudgetExceeded { sets: usize, budget: usize },
    #[error("more than {cap} optimal solutions")]
    CapExceeded { cap: usize },
    #[error("weights overflow the integer scaling")]
    WeightOverflow,
    #[error("expected a set of {expected} neighbours, got {got}")]
    WrongSetSize { expected: usize, got: usize },
    #[error("permutation is not a bijection on 0..{0}")]
    BadPermutation(usize),
    #[error("registered substructures overlap on edge {0}")]
    OverlappingSubstructures(Edge),
    #[error("clique size {n} outside supported range {min}..={max}")]
    CliqueSize { n: usize, min: usize, max: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("t = {t} is invalid: {reason}")]
    InvalidT { t: usize, reason: &'static str },
    #[error("generated graph failed its structural check: {0}")]
    Internal(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LbError {
    #[error("k = {0} unsupported (need 2 <= k <= 6)")]
    UnsupportedK(usize),
    #[error("input strings must have length {expected}, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("instance already carries inputs")]
    AlreadyHasInputs,
    #[error("instance has no inputs")]
    MissingInputs,
    #[error("precondition violated: x[{index}] = {x}, y[{index}] = {y}; both must be 1")]
    NotIntersecting { index: usize, x: bool, y: bool },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("cover has size {got}, expected {expected}")]
    WrongCoverSize { expected: usize, got: usize },
    #[error("cover is not a triangle edge transversal")]
    NotATransversal,
    #[error("no index pair (i, j) with all four bit edges absent")]
    NoBitCorrespondence,
    #[error("internal construction failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("round {round}: message {from} -> {to} has {bits} bits, bandwidth is {limit}")]
    Bandwidth { round: usize, from: usize, to: usize, bits: usize, limit: usize },
    #[error("no termination within {rounds} rounds")]
    Timeout { rounds: usize, partial: Option<Box<crate::simnet::Transcript>> },
    #[error("round {round}: simulators of {entity} disagree")]
    Incoherent { round: usize, entity: String },
    #[error("malformed message: {0}")]
    Decode(String),
    #[error("invalid model: {0}")]
    Model(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error("primal-dual slack must lie strictly between 0 and 1")]
    BadSlack,
    #[error("ball around node {node} did not stop within {cap} steps")]
    StepCapExceeded { node: usize, cap: usize },
    #[error("carving produced an invalid cover")]
    InvalidCover,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
