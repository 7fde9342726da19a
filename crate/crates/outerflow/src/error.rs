use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("instance has no nodes")]
    Empty,
    #[error("edge {edge} references node {node}, but the instance has {n} nodes")]
    NodeOutOfRange { edge: EdgeId, node: NodeId, n: usize },
    #[error("edge {edge} is a self-loop at node {node}")]
    SelfLoop { edge: EdgeId, node: NodeId },
    #[error("edge {edge} has capacity {capacity}; capacities must be at least 1")]
    NonPositiveCapacity { edge: EdgeId, capacity: i64 },
    #[error("graph is not connected: node {unreached} is unreachable from node 0")]
    NotConnected { unreached: NodeId },
    #[error("edges {first} and {second} cross with respect to the outer-cycle order")]
    CrossingChords { first: EdgeId, second: EdgeId },
    #[error("block containing nodes {a} and {b} lacks the outer-cycle edge between them")]
    MissingBoundaryEdge { a: NodeId, b: NodeId },
    #[error("instance is not 2-node-connected")]
    NotTwoConnected,
    #[error("shore must be a proper nonempty subset of the nodes")]
    EmptyOrFullShore,
    #[error("demand {demand} references node {node}, but the instance has {n} nodes")]
    DemandOutOfRange { demand: usize, node: NodeId, n: usize },
    #[error("demand {demand} has identical endpoints {node}")]
    DemandLoop { demand: usize, node: NodeId },
    #[error("demand {demand} has negative profit {profit}")]
    NegativeProfit { demand: usize, profit: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("arc [{start}, {end}] is not a central cut of this instance")]
    NotCentral { start: usize, end: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparsifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("recursion root {0} is a leaf of the dual tree")]
    RootIsLeaf(usize),
    #[error("dual edge {0} has a non-integral weight")]
    NonIntegerInput(EdgeId),
    #[error("integer weight overflow")]
    Overflow,
    #[error("positive-weight edges contain a cycle through edge {0}")]
    PositiveEdgesContainCycle(EdgeId),
    #[error("weight assignment covers {got} edges, instance has {expected}")]
    AssignmentMismatch { got: usize, expected: usize },
    #[error("edge set is not a spanning tree")]
    NotSpanningTree,
}

/// An edge or a demand, seen as a chord of the outer cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chord {
    Edge(EdgeId),
    Demand(usize),
}

impl std::fmt::Display for Chord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chord::Edge(e) => write!(f, "edge {e}"),
            Chord::Demand(d) => write!(f, "demand {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cut condition violated at shore {shore:?}: capacity {capacity} < demand {demand}")]
    CutConditionViolated {
        shore: Vec<NodeId>,
        capacity: u64,
        demand: u64,
    },
    #[error("{first} and {second} cross; G+H is not outerplanar")]
    NotJointlyOuterplanar { first: Chord, second: Chord },
    #[error("no demand has a terminal-free side")]
    NoInnermostDemand,
    #[error("cut condition invariant failed after a routing step at shore {shore:?}")]
    InvariantBroken { shore: Vec<NodeId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("edge {edge} references node {node}, but the tree has {n} nodes")]
    NodeOutOfRange { edge: EdgeId, node: NodeId, n: usize },
    #[error("edge set is not a spanning tree")]
    NotATree,
    #[error("demand {demand} endpoint {node} is not a tree node")]
    EndpointNotInTree { demand: usize, node: NodeId },
    #[error("{count} demands exceed the exact solver limit of {limit}")]
    TooManyDemands { count: usize, limit: usize },
    #[error("edge {edge} carries load {load} > k * capacity {capacity}")]
    PreconditionLoadExceeded {
        edge: EdgeId,
        load: u64,
        capacity: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("no unused routing path left for tree edge {0}")]
    BankExhausted(EdgeId),
    #[error("composed solution failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerBoundError {
    #[error("n = {0} is too large (limit 12)")]
    TooLarge(u32),
    #[error("edge set is not a spanning tree of the instance")]
    NotSpanningTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the exhaustive oracle ({nodes} nodes, {demands} demands)")]
    TooLarge { nodes: usize, demands: usize },
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
}
