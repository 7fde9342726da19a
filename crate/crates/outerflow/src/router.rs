//! Routing every demand when the cut condition holds and the demand chords
//! can be drawn inside the outer cycle together with the graph.
//!
//! Each step decomposes the residual graph into blocks, splits the pending
//! demands along the block-cut tree, and in every 2-node-connected block
//! routes one demand whose chord has a terminal-free side along that side of
//! the boundary. Bridges carry their demands directly. Capacities are
//! treated as stacks of unit copies, consumed lowest copy first.

use serde::Serialize;

use crate::error::{Chord, RouteError};
use crate::graph::{
    cut_condition_general, decompose_general, find_crossing, BlockKind, Demand, DemandSet, Edge,
    EdgeId, NodeId, OuterplanarInstance,
};

/// One routed demand. `copies[k]` is the unit copy of `edges[k]` it uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoutedPath {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub copies: Vec<u64>,
}

/// Paths indexed by demand id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoutingSolution {
    pub paths: Vec<RoutedPath>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RouteOptions {
    /// Re-check the cut condition on the residual instance after every step.
    pub debug_invariants: bool,
}

/// Looks for two crossing chords among edges and demands inside any block.
/// Demands spanning several blocks are checked through their spawned parts.
pub fn check_joint_outerplanarity(
    instance: &OuterplanarInstance,
    demands: &DemandSet,
) -> Option<(Chord, Chord)> {
    let dec = decompose_general(instance.n(), instance.edges(), demands.as_slice())
        .expect("validated instances are connected");
    for block in &dec.blocks {
        if block.kind == BlockKind::Bridge {
            continue;
        }
        let mut chords: Vec<(usize, usize, Chord)> = block
            .instance
            .edges()
            .iter()
            .zip(&block.edges)
            .map(|(e, &g)| (e.a, e.b, Chord::Edge(g)))
            .collect();
        chords.extend(
            block
                .demands
                .iter()
                .zip(&block.origin)
                .map(|(d, &o)| (d.source.min(d.target), d.source.max(d.target), Chord::Demand(o))),
        );
        if let Some((x, y)) = find_crossing(&mut chords) {
            return Some(order_pair(x, y));
        }
    }
    None
}

fn order_pair(x: Chord, y: Chord) -> (Chord, Chord) {
    let key = |c: &Chord| match c {
        Chord::Edge(e) => (0, *e),
        Chord::Demand(d) => (1, *d),
    };
    if key(&x) <= key(&y) {
        (x, y)
    } else {
        (y, x)
    }
}

/// The side of a demand chord chosen for routing, in block-local nodes from
/// `from` around the cycle in increasing order to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnermostChoice {
    pub demand: usize,
    pub from: usize,
    pub to: usize,
    /// Number of boundary edges on the arc.
    pub length: usize,
}

impl InnermostChoice {
    /// Local nodes of the arc, `from` first.
    pub fn arc(&self, m: usize) -> Vec<usize> {
        (0..=self.length).map(|k| (self.from + k) % m).collect()
    }
}

/// Among demands `(s, t)` on an `m`-cycle (local node ids), picks one with a
/// side free of terminals: shortest arc first, then smallest starting node,
/// then smallest demand index.
pub fn pick_innermost_demand(m: usize, demands: &[(usize, usize)]) -> Result<InnermostChoice, RouteError> {
    let mut terminals = vec![0usize; m];
    for &(s, t) in demands {
        terminals[s] += 1;
        terminals[t] += 1;
    }
    // prefix[k] = terminals on local nodes 0..k
    let mut prefix = vec![0usize; m + 1];
    for v in 0..m {
        prefix[v + 1] = prefix[v] + usize::from(terminals[v] > 0);
    }
    let inside = |lo: usize, hi: usize| if lo >= hi { 0 } else { prefix[hi] - prefix[lo] };
    let mut best: Option<InnermostChoice> = None;
    for (k, &(s, t)) in demands.iter().enumerate() {
        let (a, b) = (s.min(t), s.max(t));
        let sides = [
            (a, b, b - a, inside(a + 1, b)),
            (b, a, m - (b - a), inside(b + 1, m) + inside(0, a)),
        ];
        for (from, to, length, blocked) in sides {
            if blocked > 0 {
                continue;
            }
            let cand = InnermostChoice { demand: k, from, to, length };
            let better = match &best {
                None => true,
                Some(cur) => (length, from, k) < (cur.length, cur.from, cur.demand),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.ok_or(RouteError::NoInnermostDemand)
}

/// A demand or part of one, still to be routed or already routed.
enum Piece {
    Pending { source: NodeId, target: NodeId },
    Split(Vec<usize>),
    Routed { edges: Vec<EdgeId>, copies: Vec<u64> },
}

struct Router<'a> {
    instance: &'a OuterplanarInstance,
    residual: Vec<u64>,
    used: Vec<u64>,
    pieces: Vec<Piece>,
}

impl Router<'_> {
    fn take(&mut self, edge: EdgeId) -> u64 {
        let copy = self.used[edge];
        self.used[edge] += 1;
        self.residual[edge] -= 1;
        copy
    }

    fn flatten(&self, root: usize, edges: &mut Vec<EdgeId>, copies: &mut Vec<u64>) {
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            match &self.pieces[p] {
                Piece::Pending { .. } => unreachable!("all pieces are routed"),
                Piece::Split(children) => stack.extend(children.iter().rev()),
                Piece::Routed { edges: e, copies: c } => {
                    edges.extend(e);
                    copies.extend(c);
                }
            }
        }
    }
}

/// Routes every demand by edge-disjoint paths (at unit-copy granularity).
pub fn route_all(
    instance: &OuterplanarInstance,
    demands: &DemandSet,
    options: RouteOptions,
) -> Result<RoutingSolution, RouteError> {
    let n = instance.n();
    if let Some((first, second)) = check_joint_outerplanarity(instance, demands) {
        return Err(RouteError::NotJointlyOuterplanar { first, second });
    }
    let report = cut_condition_general(n, instance.edges(), demands.as_slice());
    if let Some(w) = report.worst.filter(|_| !report.holds) {
        return Err(RouteError::CutConditionViolated {
            shore: w.shore,
            capacity: w.capacity,
            demand: w.demand,
        });
    }

    let mut router = Router {
        instance,
        residual: instance.edges().iter().map(|e| e.capacity).collect(),
        used: vec![0; instance.edges().len()],
        pieces: demands
            .iter()
            .map(|d| Piece::Pending {
                source: d.source,
                target: d.target,
            })
            .collect(),
    };

    loop {
        let pending: Vec<usize> = (0..router.pieces.len())
            .filter(|&p| matches!(router.pieces[p], Piece::Pending { .. }))
            .collect();
        if pending.is_empty() {
            break;
        }
        let live: Vec<EdgeId> = (0..instance.edges().len())
            .filter(|&e| router.residual[e] > 0)
            .collect();
        let edges: Vec<Edge> = live
            .iter()
            .map(|&e| {
                let o = instance.edge(e);
                Edge::new(o.a, o.b, router.residual[e])
            })
            .collect();
        let wanted: Vec<Demand> = pending
            .iter()
            .map(|&p| match router.pieces[p] {
                Piece::Pending { source, target } => Demand::new(source, target, 1),
                _ => unreachable!(),
            })
            .collect();
        if options.debug_invariants {
            let check = cut_condition_general(n, &edges, &wanted);
            if !check.holds {
                return Err(RouteError::InvariantBroken {
                    shore: check.worst.map(|w| w.shore).unwrap_or_default(),
                });
            }
        }
        let dec = decompose_general(n, &edges, &wanted).map_err(|k| RouteError::InvariantBroken {
            shore: vec![wanted[k].source],
        })?;

        // Piece handling each spawned part, by (block, local demand).
        let mut part_piece: Vec<Vec<usize>> =
            dec.blocks.iter().map(|b| vec![usize::MAX; b.demands.len()]).collect();
        for (k, parts) in dec.spawned.iter().enumerate() {
            let p = pending[k];
            if let [only] = parts.as_slice() {
                part_piece[only.block][only.local] = p;
                continue;
            }
            let mut children = Vec::with_capacity(parts.len());
            for sp in parts {
                let d = dec.blocks[sp.block].demands.get(sp.local);
                let nodes = &dec.blocks[sp.block].nodes;
                let child = router.pieces.len();
                router.pieces.push(Piece::Pending {
                    source: nodes[d.source],
                    target: nodes[d.target],
                });
                part_piece[sp.block][sp.local] = child;
                children.push(child);
            }
            router.pieces[p] = Piece::Split(children);
        }

        for (b, block) in dec.blocks.iter().enumerate() {
            if block.demands.is_empty() {
                continue;
            }
            let global = |le: usize| live[block.edges[le]];
            match block.kind {
                BlockKind::Bridge => {
                    let e = global(0);
                    for &piece in &part_piece[b][..block.demands.len()] {
                        let copy = router.take(e);
                        router.pieces[piece] = Piece::Routed {
                            edges: vec![e],
                            copies: vec![copy],
                        };
                    }
                }
                BlockKind::Biconnected => {
                    let m = block.nodes.len();
                    let local: Vec<(usize, usize)> =
                        block.demands.iter().map(|d| (d.source, d.target)).collect();
                    let choice = pick_innermost_demand(m, &local)?;
                    let mut arc = choice.arc(m);
                    if block.demands.get(choice.demand).source != arc[0] {
                        arc.reverse();
                    }
                    let mut path = Vec::with_capacity(arc.len() - 1);
                    let mut copies = Vec::with_capacity(arc.len() - 1);
                    for w in arc.windows(2) {
                        let (x, y) = (w[0].min(w[1]), w[0].max(w[1]));
                        let e = (0..block.edges.len())
                            .filter(|&le| {
                                let le_edge = block.instance.edge(le);
                                (le_edge.a, le_edge.b) == (x, y)
                            })
                            .map(global)
                            .filter(|&e| router.residual[e] > 0)
                            .min()
                            .ok_or_else(|| RouteError::InvariantBroken {
                                shore: vec![block.nodes[x], block.nodes[y]],
                            })?;
                        copies.push(router.take(e));
                        path.push(e);
                    }
                    router.pieces[part_piece[b][choice.demand]] = Piece::Routed { edges: path, copies };
                }
            }
        }
    }

    let paths = demands
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let (mut edges, mut copies) = (Vec::new(), Vec::new());
            router.flatten(k, &mut edges, &mut copies);
            let nodes = walk_nodes(router.instance, d.source, &edges);
            RoutedPath { nodes, edges, copies }
        })
        .collect();
    Ok(RoutingSolution { paths })
}

/// Node sequence of a walk given by edge ids starting at `source`.
pub fn walk_nodes(instance: &OuterplanarInstance, source: NodeId, edges: &[EdgeId]) -> Vec<NodeId> {
    let mut nodes = vec![source];
    let mut at = source;
    for &e in edges {
        at = instance.edge(e).other(at);
        nodes.push(at);
    }
    nodes
}
