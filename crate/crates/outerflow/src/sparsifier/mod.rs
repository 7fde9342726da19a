//! Single-subtree cut sparsifiers.
//!
//! Weights are assigned on the dual tree of each 2-node-connected block so
//! that every leaf-to-leaf distance (equivalently every central cut) is
//! approximated, and every dual node keeps a zero-weight path to a leaf. The
//! second property makes the positive-weight primal edges a forest, which is
//! then completed to a spanning tree of the instance.
//!
//! Two numeric modes are provided:
//!
//! | mode      | cut depth     | weight above `r_i`      | leaf-pair bounds      |
//! |-----------|---------------|-------------------------|-----------------------|
//! | `Real`    | `h/2`         | `h(r_i)`                | `d/4 <= d* <= 2d`     |
//! | `Integer` | `ceil(h/2)`   | `max(floor(h(r_i)/2),1)`| `d/14 <= d* <= d`     |

mod metric;
mod report;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use metric::RecursionAudit;
pub use report::{
    check_all_subsets, cut_ratio_report, leaf_pair_report, AllSubsetsReport, CutRatio, CutReport,
    LeafPairReport,
};

use crate::dual::{build_dual_tree, DualTree};
use crate::error::SparsifyError;
use crate::graph::{block_decompose, BlockKind, DemandSet, EdgeId, NodeId, OuterplanarInstance};
use metric::MetricTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Real,
    Integer,
}

impl NumericMode {
    /// `(alpha, beta)` with `alpha * u(δ_G(X)) <= û(δ_T(X)) <= beta * u(δ_G(X))`.
    pub fn bounds(self) -> (BigRational, BigRational) {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        match self {
            NumericMode::Real => (r(1, 4), r(2, 1)),
            NumericMode::Integer => (r(1, 14), r(1, 1)),
        }
    }
}

/// Weights `u*` per primal edge id, the aggregate of their pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    pub mode: NumericMode,
    pub weights: Vec<BigRational>,
    pub audit: RecursionAudit,
    /// Every dual node has a zero-weight path to a leaf.
    pub zero_paths: bool,
}

impl WeightAssignment {
    /// Integral weights, or `None` in real mode.
    pub fn integer_weights(&self) -> Option<Vec<u64>> {
        if self.mode != NumericMode::Integer {
            return None;
        }
        self.weights
            .iter()
            .map(|w| w.is_integer().then(|| w.to_integer().to_u64()).flatten())
            .collect()
    }
}

fn integer(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Real-mode recursion on a dual tree with its own weights.
pub fn assign_weights_real(dual: &DualTree) -> Result<WeightAssignment, SparsifyError> {
    let lengths: Vec<BigRational> = dual.edges.iter().map(|e| integer(e.weight)).collect();
    assign_weights_real_with(dual, &lengths)
}

/// Real-mode recursion with arbitrary positive rational edge lengths.
pub fn assign_weights_real_with(
    dual: &DualTree,
    lengths: &[BigRational],
) -> Result<WeightAssignment, SparsifyError> {
    run(dual, lengths.to_vec(), NumericMode::Real)
}

/// Integer-mode recursion on a dual tree with its own weights.
pub fn assign_weights_integer(dual: &DualTree) -> Result<WeightAssignment, SparsifyError> {
    let lengths: Vec<BigRational> = dual.edges.iter().map(|e| integer(e.weight)).collect();
    assign_weights_integer_with(dual, &lengths)
}

/// Integer-mode recursion; fails on non-integral lengths.
pub fn assign_weights_integer_with(
    dual: &DualTree,
    lengths: &[BigRational],
) -> Result<WeightAssignment, SparsifyError> {
    let ints = lengths
        .iter()
        .enumerate()
        .map(|(e, w)| {
            if !w.is_integer() {
                return Err(SparsifyError::NonIntegerInput(e));
            }
            w.to_integer().to_i128().ok_or(SparsifyError::Overflow)
        })
        .collect::<Result<Vec<i128>, _>>()?;
    run(dual, ints, NumericMode::Integer)
}

fn run<L: metric::Length>(dual: &DualTree, lengths: Vec<L>, mode: NumericMode) -> Result<WeightAssignment, SparsifyError> {
    let root = dual.root_hint;
    if dual.is_leaf(root) {
        return Err(SparsifyError::RootIsLeaf(root));
    }
    let mut tree = MetricTree::new(dual, root, &lengths);
    let audit = tree.assign(root);
    let weights = tree
        .edge_weights(dual.edges.len())
        .iter()
        .map(L::to_rational)
        .collect();
    Ok(WeightAssignment {
        mode,
        weights,
        audit,
        zero_paths: tree.zero_paths_to_leaves(),
    })
}

/// Runs the chosen recursion on every 2-node-connected block and keeps
/// bridges at full capacity. Weights are indexed by instance edge id.
pub fn assign_instance_weights(
    instance: &OuterplanarInstance,
    mode: NumericMode,
) -> Result<WeightAssignment, SparsifyError> {
    let mut weights = vec![BigRational::zero(); instance.edges().len()];
    let mut audit = RecursionAudit::default();
    let mut zero_paths = true;
    for block in block_decompose(instance, &DemandSet::empty()).blocks {
        match block.kind {
            BlockKind::Bridge => {
                let id = block.edges[0];
                weights[id] = integer(instance.edge(id).capacity);
            }
            BlockKind::Biconnected => {
                let dual = build_dual_tree(&block.instance)?;
                let w = match mode {
                    NumericMode::Real => assign_weights_real(&dual)?,
                    NumericMode::Integer => assign_weights_integer(&dual)?,
                };
                for (local, global) in block.edges.iter().enumerate() {
                    weights[*global] = w.weights[local].clone();
                }
                audit.merge(w.audit);
                zero_paths &= w.zero_paths;
            }
        }
    }
    Ok(WeightAssignment {
        mode,
        weights,
        audit,
        zero_paths,
    })
}

/// A spanning tree of the instance with capacities `û`. Capacities are
/// integral in integer mode; filler edges carry `û = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeSparsifier {
    pub mode: NumericMode,
    /// Tree edge ids in ascending order.
    pub tree_edges: Vec<EdgeId>,
    /// Edges added only to complete the positive forest to a spanning tree.
    pub fillers: Vec<EdgeId>,
    /// `û` indexed by instance edge id, zero off the tree.
    pub capacity: Vec<BigRational>,
}

impl SubtreeSparsifier {
    /// A spanning tree whose edges keep their own capacities.
    pub fn exact_weights(
        instance: &OuterplanarInstance,
        tree_edges: &[EdgeId],
    ) -> Result<Self, SparsifyError> {
        if !is_spanning_tree(instance, tree_edges) {
            return Err(SparsifyError::NotSpanningTree);
        }
        let mut capacity = vec![BigRational::zero(); instance.edges().len()];
        for &e in tree_edges {
            capacity[e] = integer(instance.edge(e).capacity);
        }
        let mut tree_edges = tree_edges.to_vec();
        tree_edges.sort_unstable();
        Ok(SubtreeSparsifier {
            mode: NumericMode::Integer,
            tree_edges,
            fillers: Vec::new(),
            capacity,
        })
    }

    /// `(edge id, û)` for every tree edge; `None` unless all are integral.
    pub fn integer_capacities(&self) -> Option<Vec<(EdgeId, u64)>> {
        self.tree_edges
            .iter()
            .map(|&e| {
                let c = &self.capacity[e];
                c.is_integer().then(|| c.to_integer().to_u64().map(|v| (e, v))).flatten()
            })
            .collect()
    }

    pub fn to_json(&self, instance: &OuterplanarInstance) -> SparsifierFile {
        SparsifierFile {
            mode: self.mode,
            n: instance.n(),
            edges: self
                .tree_edges
                .iter()
                .map(|&e| {
                    let edge = instance.edge(e);
                    TreeEdgeRecord {
                        id: e,
                        a: edge.a,
                        b: edge.b,
                        capacity: crate::rational::to_string(&self.capacity[e]),
                        filler: self.fillers.contains(&e),
                    }
                })
                .collect(),
        }
    }
}

/// `sparsifier.json`: the tree edges with their capacities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SparsifierFile {
    pub mode: NumericMode,
    pub n: usize,
    pub edges: Vec<TreeEdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeEdgeRecord {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
    /// An integer, or `p/q` in real mode.
    pub capacity: String,
    pub filler: bool,
}

pub(crate) fn is_spanning_tree(instance: &OuterplanarInstance, tree_edges: &[EdgeId]) -> bool {
    let n = instance.n();
    if tree_edges.len() + 1 != n {
        return false;
    }
    let mut uf = UnionFind::new(n);
    tree_edges.iter().all(|&e| {
        e < instance.edges().len() && {
            let edge = instance.edge(e);
            uf.union(edge.a, edge.b)
        }
    })
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
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

    /// Joins the classes of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Turns an assignment into a spanning tree: positive-weight edges must form
/// a forest, which is completed by ascending edge id with `û = 0` fillers.
pub fn extract_subtree(
    instance: &OuterplanarInstance,
    assignment: &WeightAssignment,
) -> Result<SubtreeSparsifier, SparsifyError> {
    let m = instance.edges().len();
    if assignment.weights.len() != m {
        return Err(SparsifyError::AssignmentMismatch {
            got: assignment.weights.len(),
            expected: m,
        });
    }
    let mut uf = UnionFind::new(instance.n());
    let mut tree_edges = Vec::new();
    for (id, w) in assignment.weights.iter().enumerate() {
        if w > &BigRational::zero() {
            let e = instance.edge(id);
            if !uf.union(e.a, e.b) {
                return Err(SparsifyError::PositiveEdgesContainCycle(id));
            }
            tree_edges.push(id);
        }
    }
    let mut fillers = Vec::new();
    for (id, e) in instance.edges().iter().enumerate() {
        if uf.union(e.a, e.b) {
            fillers.push(id);
            tree_edges.push(id);
        }
    }
    tree_edges.sort_unstable();
    let mut capacity = vec![BigRational::zero(); m];
    for &e in &tree_edges {
        capacity[e] = assignment.weights[e].clone();
    }
    Ok(SubtreeSparsifier {
        mode: assignment.mode,
        tree_edges,
        fillers,
        capacity,
    })
}

/// Weight assignment on every block followed by subtree extraction.
pub fn sparsify(
    instance: &OuterplanarInstance,
    mode: NumericMode,
) -> Result<(WeightAssignment, SubtreeSparsifier), SparsifyError> {
    let w = assign_instance_weights(instance, mode)?;
    let t = extract_subtree(instance, &w)?;
    Ok((w, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{DualEdge, DualNode};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    /// Root 2 with leaves 0 and 1 at the given distances.
    fn cherry(short: u64, long: u64) -> DualTree {
        let leaf = |i| DualNode {
            leaf: true,
            segment: Some((i, 1 - i)),
            face: vec![],
        };
        DualTree {
            nodes: vec![
                leaf(0),
                leaf(1),
                DualNode {
                    leaf: false,
                    segment: None,
                    face: vec![0, 1],
                },
            ],
            edges: vec![
                DualEdge { a: 2, b: 0, weight: short, primal: 0 },
                DualEdge { a: 2, b: 1, weight: long, primal: 1 },
            ],
            root_hint: 2,
        }
    }

    #[test]
    fn real_c4_star() {
        let dual = build_dual_tree(&OuterplanarInstance::cycle(4)).unwrap();
        let w = assign_weights_real(&dual).unwrap();
        // The first cut point keeps a zero path; the other three get h = 1/2.
        assert_eq!(w.weights, vec![q(0, 1), q(1, 2), q(1, 2), q(1, 2)]);
        assert!(w.audit.is_clean());
        assert!(w.zero_paths);
        // Leaf pairs: d = 2 everywhere, d* in {1/2, 1}, inside [1/2, 4].
        let r = leaf_pair_report(&dual, &w);
        assert_eq!(r.pairs, 6);
        assert_eq!((r.min_ratio.clone(), r.max_ratio.clone()), (q(1, 4), q(1, 2)));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn real_cherry_one_three() {
        let dual = cherry(1, 3);
        let w = assign_weights_real(&dual).unwrap();
        // h(r) = 1, cut points at depth 1/2 with heights 1/2 and 5/2.
        assert_eq!(w.weights, vec![q(0, 1), q(5, 2)]);
        // d(x, y) = 4, d* = 5/2, inside [1, 8].
        let r = leaf_pair_report(&dual, &w);
        assert_eq!(r.min_ratio, q(5, 8));
        assert!(r.violations.is_empty());
        assert!(w.audit.is_clean());
    }

    #[test]
    fn bare_path_gets_zero() {
        // A root with a single leaf below.
        let dual = DualTree {
            nodes: vec![
                DualNode { leaf: true, segment: None, face: vec![] },
                DualNode { leaf: false, segment: None, face: vec![] },
            ],
            edges: vec![DualEdge { a: 1, b: 0, weight: 8, primal: 0 }],
            root_hint: 1,
        };
        let real = assign_weights_real(&dual).unwrap();
        assert_eq!(real.weights, vec![q(0, 1)]);
        let int = assign_weights_integer(&dual).unwrap();
        assert_eq!(int.integer_weights(), Some(vec![0]));
        assert_eq!(int.audit.roots, 1);
    }

    #[test]
    fn integer_c4_star() {
        let dual = build_dual_tree(&OuterplanarInstance::cycle(4)).unwrap();
        let w = assign_weights_integer(&dual).unwrap();
        assert_eq!(w.integer_weights(), Some(vec![0, 1, 1, 1]));
        assert!(w.audit.is_clean());
        let r = leaf_pair_report(&dual, &w);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn integer_cherry_two_six() {
        let dual = cherry(2, 6);
        let w = assign_weights_integer(&dual).unwrap();
        // h(r) = 2, cut depth 1. Cut points: height 1 (short) and 5 (long);
        // the long one gets max(floor(5/2), 1) = 2 on its upper piece.
        assert_eq!(w.integer_weights(), Some(vec![0, 2]));
        let r = leaf_pair_report(&dual, &w);
        // d = 8, d* = 2, inside [8/14, 8].
        assert_eq!(r.min_ratio, q(1, 4));
        assert!(r.violations.is_empty());
        assert!(w.audit.is_clean());
    }

    #[test]
    fn integer_rejects_fractional_lengths() {
        let dual = cherry(1, 1);
        let err = assign_weights_integer_with(&dual, &[q(1, 2), q(1, 1)]).unwrap_err();
        assert_eq!(err, SparsifyError::NonIntegerInput(0));
    }

    #[test]
    fn leaf_root_rejected() {
        let mut dual = cherry(1, 1);
        dual.root_hint = 0;
        assert_eq!(assign_weights_real(&dual), Err(SparsifyError::RootIsLeaf(0)));
    }

    #[test]
    fn c4_extracts_hamiltonian_path() {
        let g = OuterplanarInstance::cycle(4);
        let (_, t) = sparsify(&g, NumericMode::Integer).unwrap();
        assert_eq!(t.tree_edges, vec![1, 2, 3]);
        assert!(t.fillers.is_empty());
        assert_eq!(t.integer_capacities(), Some(vec![(1, 1), (2, 1), (3, 1)]));
    }

    #[test]
    fn c3_keeps_two_edges() {
        let (_, t) = sparsify(&OuterplanarInstance::cycle(3), NumericMode::Integer).unwrap();
        assert_eq!(t.integer_capacities(), Some(vec![(1, 1), (2, 1)]));
    }

    #[test]
    fn zero_assignment_gives_filler_tree() {
        let g = OuterplanarInstance::cycle(5);
        let w = WeightAssignment {
            mode: NumericMode::Integer,
            weights: vec![BigRational::zero(); 5],
            audit: RecursionAudit::default(),
            zero_paths: true,
        };
        let t = extract_subtree(&g, &w).unwrap();
        assert_eq!(t.fillers, vec![0, 1, 2, 3]);
        assert!(t.capacity.iter().all(Zero::is_zero));
    }

    #[test]
    fn cycle_of_positive_edges_is_reported() {
        let g = OuterplanarInstance::cycle(3);
        let w = WeightAssignment {
            mode: NumericMode::Integer,
            weights: vec![integer(1); 3],
            audit: RecursionAudit::default(),
            zero_paths: false,
        };
        assert_eq!(extract_subtree(&g, &w), Err(SparsifyError::PositiveEdgesContainCycle(2)));
    }

    #[test]
    fn bridges_keep_capacity() {
        let g = OuterplanarInstance::new(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 1), (3, 1, 1)]).unwrap();
        let (w, t) = sparsify(&g, NumericMode::Integer).unwrap();
        assert_eq!(w.weights[0], integer(3));
        assert!(t.tree_edges.contains(&0));
        assert_eq!(t.tree_edges.len(), 3);
    }

    #[test]
    fn exact_weight_tree() {
        let g = OuterplanarInstance::cycle(4);
        assert!(SubtreeSparsifier::exact_weights(&g, &[0, 1, 2]).is_ok());
        assert_eq!(
            SubtreeSparsifier::exact_weights(&g, &[0, 1]),
            Err(SparsifyError::NotSpanningTree)
        );
    }
}
