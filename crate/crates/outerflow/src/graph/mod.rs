//! Capacitated outerplanar multigraphs, demand sets, block decomposition and
//! cut machinery.
//!
//! Nodes are labeled `0..n` in the order they appear on the outer cycle. The
//! input carries no separate embedding: validation checks that within every
//! 2-node-connected block the edges are pairwise non-crossing with respect to
//! that circular order.

mod blocks;
mod cuts;

use serde::{Deserialize, Serialize};

pub use blocks::{block_decompose, Block, BlockDecomposition, BlockKind, SpawnedDemand};
pub use cuts::{
    check_cut_condition, cut_capacity, enumerate_central_cuts, CentralCut, CutConditionReport,
    EXHAUSTIVE_NODE_LIMIT,
};

pub(crate) use blocks::{decompose_general, decompose_parts, find_crossing};
pub(crate) use cuts::{arc_table, cut_condition_general};

use crate::error::GraphError;

pub type NodeId = usize;
pub type EdgeId = usize;

/// An undirected capacitated edge. Endpoints are stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: u64,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, capacity: u64) -> Self {
        Edge {
            a: u.min(v),
            b: u.max(v),
            capacity,
        }
    }

    pub fn other(&self, v: NodeId) -> NodeId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn crosses(&self, shore: &[bool]) -> bool {
        shore[self.a] != shore[self.b]
    }
}

/// A validated capacitated outerplanar multigraph. Edge ids are positions in
/// [`OuterplanarInstance::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterplanarInstance {
    n: usize,
    edges: Vec<Edge>,
}

impl OuterplanarInstance {
    /// Validates a raw edge list `(a, b, capacity)`.
    pub fn new(n: usize, raw: &[(NodeId, NodeId, i64)]) -> Result<Self, GraphError> {
        validate_instance(n, raw)
    }

    /// Unit-capacity convenience constructor.
    pub fn unit(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let raw: Vec<_> = pairs.iter().map(|&(a, b)| (a, b, 1)).collect();
        validate_instance(n, &raw)
    }

    /// The cycle `0-1-...-(n-1)-0` with unit capacities.
    pub fn cycle(n: usize) -> Self {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::unit(n, &pairs).expect("cycle is outerplanar")
    }

    pub(crate) fn from_parts_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        OuterplanarInstance { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn total_capacity(&self) -> u64 {
        self.edges.iter().map(|e| e.capacity).sum()
    }

    /// Adjacency lists of `(neighbor, edge id)`, in ascending edge id order.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, EdgeId)>> {
        adjacency(self.n, &self.edges)
    }

    /// True when the instance is a single 2-node-connected block covering
    /// every node.
    pub fn is_two_connected(&self) -> bool {
        let parts = decompose_parts(self.n, &self.edges);
        parts.len() == 1 && parts[0].1.len() >= 2 && parts[0].0.len() == self.n
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| (e.a, e.b, e.capacity as i64))
                .collect(),
        }
    }
}

pub(crate) fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<(NodeId, EdgeId)>> {
    let mut adj = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        adj[e.a].push((e.b, id));
        adj[e.b].push((e.a, id));
    }
    adj
}

/// Checks a raw instance and returns it in canonical form (endpoints ordered,
/// parallel edges kept in id order).
pub fn validate_instance(
    n: usize,
    raw: &[(NodeId, NodeId, i64)],
) -> Result<OuterplanarInstance, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut edges = Vec::with_capacity(raw.len());
    for (id, &(a, b, cap)) in raw.iter().enumerate() {
        for node in [a, b] {
            if node >= n {
                return Err(GraphError::NodeOutOfRange { edge: id, node, n });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop { edge: id, node: a });
        }
        if cap < 1 {
            return Err(GraphError::NonPositiveCapacity {
                edge: id,
                capacity: cap,
            });
        }
        edges.push(Edge::new(a, b, cap as u64));
    }

    let adj = adjacency(n, &edges);
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(unreached) = seen.iter().position(|s| !s) {
        return Err(GraphError::NotConnected { unreached });
    }

    for (nodes, block_edges) in decompose_parts(n, &edges) {
        if block_edges.len() < 2 {
            continue;
        }
        let local = local_index(n, &nodes);
        let m = nodes.len();
        let mut boundary = vec![false; m];
        let mut chords = Vec::with_capacity(block_edges.len());
        for &id in &block_edges {
            let e = &edges[id];
            let (la, lb) = (local[e.a], local[e.b]);
            if lb == la + 1 {
                boundary[la] = true;
            }
            if la == 0 && lb == m - 1 {
                boundary[m - 1] = true;
            }
            chords.push((la, lb, id));
        }
        if let Some((first, second)) = find_crossing(&mut chords) {
            return Err(GraphError::CrossingChords { first, second });
        }
        if let Some(i) = boundary.iter().position(|b| !b) {
            return Err(GraphError::MissingBoundaryEdge {
                a: nodes[i],
                b: nodes[(i + 1) % m],
            });
        }
    }

    Ok(OuterplanarInstance { n, edges })
}

/// Maps global node ids to their rank within `nodes` (which is sorted).
pub(crate) fn local_index(n: usize, nodes: &[NodeId]) -> Vec<usize> {
    let mut local = vec![usize::MAX; n];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    local
}

/// A unit request between two nodes with a non-negative profit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Demand {
    pub source: NodeId,
    pub target: NodeId,
    pub profit: u64,
}

impl Demand {
    pub fn new(source: NodeId, target: NodeId, profit: u64) -> Self {
        Demand {
            source,
            target,
            profit,
        }
    }

    pub fn crosses(&self, shore: &[bool]) -> bool {
        shore[self.source] != shore[self.target]
    }
}

/// Unit demands; the demand id is the position in the sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DemandSet {
    demands: Vec<Demand>,
}

impl DemandSet {
    pub fn new(n: usize, demands: Vec<Demand>) -> Result<Self, GraphError> {
        for (i, d) in demands.iter().enumerate() {
            for node in [d.source, d.target] {
                if node >= n {
                    return Err(GraphError::DemandOutOfRange { demand: i, node, n });
                }
            }
            if d.source == d.target {
                return Err(GraphError::DemandLoop {
                    demand: i,
                    node: d.source,
                });
            }
        }
        Ok(DemandSet { demands })
    }

    /// Unit-profit demands from endpoint pairs.
    pub fn pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        Self::new(n, pairs.iter().map(|&(s, t)| Demand::new(s, t, 1)).collect())
    }

    pub fn from_raw(n: usize, raw: &[(NodeId, NodeId, i64)]) -> Result<Self, GraphError> {
        let mut demands = Vec::with_capacity(raw.len());
        for (i, &(s, t, p)) in raw.iter().enumerate() {
            if p < 0 {
                return Err(GraphError::NegativeProfit {
                    demand: i,
                    profit: p,
                });
            }
            demands.push(Demand::new(s, t, p as u64));
        }
        Self::new(n, demands)
    }

    pub(crate) fn from_vec_unchecked(demands: Vec<Demand>) -> Self {
        DemandSet { demands }
    }

    pub fn empty() -> Self {
        DemandSet::default()
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Demand> {
        self.demands.iter()
    }

    pub fn as_slice(&self) -> &[Demand] {
        &self.demands
    }

    pub fn get(&self, id: usize) -> &Demand {
        &self.demands[id]
    }

    pub fn total_profit(&self) -> u64 {
        self.demands.iter().map(|d| d.profit).sum()
    }

    /// The demands at the given ids, in the given order.
    pub fn subset(&self, ids: &[usize]) -> DemandSet {
        DemandSet {
            demands: ids.iter().map(|&i| self.demands[i]).collect(),
        }
    }

    pub fn to_raw(&self) -> RawDemands {
        RawDemands {
            demands: self
                .demands
                .iter()
                .map(|d| (d.source, d.target, d.profit as i64))
                .collect(),
        }
    }
}

/// `{"n": <int>, "edges": [[a, b, cap], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RawInstance {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId, i64)>,
}

impl RawInstance {
    pub fn validate(&self) -> Result<OuterplanarInstance, GraphError> {
        validate_instance(self.n, &self.edges)
    }
}

/// `{"demands": [[s, t, profit], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RawDemands {
    pub demands: Vec<(NodeId, NodeId, i64)>,
}

impl RawDemands {
    pub fn validate(&self, n: usize) -> Result<DemandSet, GraphError> {
        DemandSet::from_raw(n, &self.demands)
    }
}
