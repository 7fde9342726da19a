//! The dual tree of a 2-node-connected outerplanar instance.
//!
//! Adding an apex adjacent to every node splits the outer face into one face
//! per outer-cycle segment. Those faces are the leaves of the dual tree; the
//! inner faces of the instance are its internal nodes. Every primal edge is
//! crossed by exactly one dual edge, weighted by the primal capacity, and the
//! dual of a central cut is a leaf-to-leaf path.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{DualError, GraphError};
use crate::graph::{CentralCut, EdgeId, NodeId, OuterplanarInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualNode {
    pub leaf: bool,
    /// For a leaf, the outer-cycle segment `(i, i + 1 mod n)` it sits on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<(NodeId, NodeId)>,
    /// For an internal node, the primal nodes around its face.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub face: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub weight: u64,
    pub primal: EdgeId,
}

/// Leaves are nodes `0..n` (leaf `i` sits on segment `(i, i + 1 mod n)`),
/// internal faces follow. Dual edge `e` crosses primal edge `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualTree {
    pub nodes: Vec<DualNode>,
    pub edges: Vec<DualEdge>,
    pub root_hint: usize,
}

impl DualTree {
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|v| v.leaf).count()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].leaf
    }

    /// Adjacency lists of `(neighbor, dual edge id)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, id));
            adj[e.b].push((e.a, id));
        }
        adj
    }

    /// Dual edges on the tree path between two nodes, in order from `from`.
    pub fn path(&self, from: usize, to: usize) -> Vec<EdgeId> {
        let adj = self.adjacency();
        let mut via = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = to;
        while let Some((p, e)) = via[v] {
            path.push(e);
            v = p;
        }
        path.reverse();
        path
    }

    pub fn path_weight(&self, path: &[EdgeId]) -> u64 {
        path.iter().map(|&e| self.edges[e].weight).sum()
    }
}

/// Builds the dual tree by tracing the faces of the embedding induced by the
/// circular node order. Parallel edges bound 2-gon faces, which appear as
/// internal nodes of degree 2.
pub fn build_dual_tree(instance: &OuterplanarInstance) -> Result<DualTree, GraphError> {
    if !instance.is_two_connected() {
        return Err(GraphError::NotTwoConnected);
    }
    let n = instance.n();
    let edges = instance.edges();

    // Rank of each edge among the parallel copies of its node pair. Copy 0
    // hugs the arc a..b, the last copy hugs the complementary arc.
    let mut rank = vec![0usize; edges.len()];
    let mut copies = std::collections::HashMap::<(NodeId, NodeId), usize>::new();
    for (id, e) in edges.iter().enumerate() {
        let c = copies.entry((e.a, e.b)).or_insert(0);
        rank[id] = *c;
        *c += 1;
    }

    // Rotation at every node: darts ordered by angular position on the
    // convex drawing. Dart 2e runs a->b, dart 2e+1 runs b->a.
    let mut rotation: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        let k = copies[&(e.a, e.b)];
        rotation[e.a].push(((e.b + n - e.a) % n, rank[id], 2 * id));
        rotation[e.b].push(((e.a + n - e.b) % n, k - 1 - rank[id], 2 * id + 1));
    }
    let mut position = vec![0usize; 2 * edges.len()];
    for rot in rotation.iter_mut() {
        rot.sort_unstable();
        for (p, &(_, _, dart)) in rot.iter().enumerate() {
            position[dart] = p;
        }
    }
    let head = |dart: usize| {
        let e = &edges[dart / 2];
        if dart.is_multiple_of(2) {
            e.b
        } else {
            e.a
        }
    };

    let mut face_of = vec![usize::MAX; 2 * edges.len()];
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for start in 0..2 * edges.len() {
        if face_of[start] != usize::MAX {
            continue;
        }
        let f = faces.len();
        let mut darts = Vec::new();
        let mut d = start;
        while face_of[d] == usize::MAX {
            face_of[d] = f;
            darts.push(d);
            let v = head(d);
            let rot = &rotation[v];
            let p = position[d ^ 1];
            d = rot[(p + 1) % rot.len()].2;
        }
        faces.push(darts);
    }

    // Outermost copy on each segment (i, i+1 mod n).
    let outer_edge = |segment: usize| -> EdgeId {
        let (a, b) = if segment + 1 < n {
            (segment, segment + 1)
        } else {
            (0, n - 1)
        };
        let want = if segment + 1 < n {
            0
        } else {
            copies[&(a, b)] - 1
        };
        (0..edges.len())
            .find(|&id| edges[id].a == a && edges[id].b == b && rank[id] == want)
            .expect("boundary edge present")
    };
    let segment_edges: Vec<EdgeId> = (0..n).map(outer_edge).collect();
    let e0 = segment_edges[0];
    let outer = [face_of[2 * e0], face_of[2 * e0 + 1]]
        .into_iter()
        .find(|&f| {
            faces[f].len() == n
                && segment_edges
                    .iter()
                    .all(|&e| face_of[2 * e] == f || face_of[2 * e + 1] == f)
        })
        .expect("outer face traced");
    let mut segment_of_edge = vec![usize::MAX; edges.len()];
    for (s, &e) in segment_edges.iter().enumerate() {
        segment_of_edge[e] = s;
    }

    let mut nodes: Vec<DualNode> = (0..n)
        .map(|i| DualNode {
            leaf: true,
            segment: Some((i, (i + 1) % n)),
            face: Vec::new(),
        })
        .collect();
    let mut dual_id = vec![usize::MAX; faces.len()];
    for (f, darts) in faces.iter().enumerate() {
        if f != outer {
            dual_id[f] = nodes.len();
            nodes.push(DualNode {
                leaf: false,
                segment: None,
                face: darts.iter().map(|&d| head(d ^ 1)).collect(),
            });
        }
    }
    let side = |e: EdgeId, dart: usize| {
        let f = face_of[dart];
        if f == outer {
            segment_of_edge[e]
        } else {
            dual_id[f]
        }
    };
    let dual_edges: Vec<DualEdge> = edges
        .iter()
        .enumerate()
        .map(|(id, e)| DualEdge {
            a: side(id, 2 * id),
            b: side(id, 2 * id + 1),
            weight: e.capacity,
            primal: id,
        })
        .collect();

    let tree = DualTree {
        root_hint: n,
        nodes,
        edges: dual_edges,
    };
    debug_assert_eq!(tree.nodes.len(), tree.edges.len() + 1);
    debug_assert!(tree
        .adjacency()
        .iter()
        .enumerate()
        .all(|(v, adj)| if tree.is_leaf(v) { adj.len() == 1 } else { adj.len() >= 2 }));
    Ok(tree)
}

/// The dual of a central cut: the leaf-to-leaf path between the leaves on the
/// two outer-cycle segments the arc's boundary crosses.
pub fn cut_to_dual_path(dual: &DualTree, cut: &CentralCut) -> Result<Vec<EdgeId>, DualError> {
    let n = dual.leaf_count();
    let not_central = DualError::NotCentral {
        start: cut.start,
        end: cut.end,
    };
    if cut.start > cut.end || cut.end + 1 >= n {
        return Err(not_central);
    }
    let from = (cut.start + n - 1) % n;
    let path = dual.path(from, cut.end);
    let mut crossed = path.clone();
    crossed.sort_unstable();
    let mut expected = cut.cut_edges.clone();
    expected.sort_unstable();
    if crossed != expected {
        return Err(not_central);
    }
    Ok(path)
}
