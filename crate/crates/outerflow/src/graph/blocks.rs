use std::collections::VecDeque;

use super::{adjacency, local_index, Demand, DemandSet, Edge, EdgeId, NodeId, OuterplanarInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// A single edge whose removal disconnects the graph.
    Bridge,
    /// A maximal 2-node-connected subgraph (a 2-cycle of parallel edges counts).
    Biconnected,
}

/// One block with its spawned demands, in block-local coordinates. Local node
/// `i` is `nodes[i]`; local edge `j` is `edges[j]`.
#[derive(Debug, Clone)]
pub struct Block {
    pub kind: BlockKind,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub instance: OuterplanarInstance,
    pub demands: DemandSet,
    /// Original demand id of every spawned demand.
    pub origin: Vec<usize>,
}

/// Position of a spawned demand: block index and local demand index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpawnedDemand {
    pub block: usize,
    pub local: usize,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    /// For every original demand, its spawned demands in source-to-target order.
    pub spawned: Vec<Vec<SpawnedDemand>>,
}

impl BlockDecomposition {
    /// Reassembles per-block routings into paths of the original graph.
    ///
    /// `paths[b][j]` is the local edge sequence routing local demand `j` of
    /// block `b` from its source to its target. The result holds, per original
    /// demand, global edge ids forming a walk from source to target.
    pub fn lift(&self, paths: &[Vec<Vec<EdgeId>>]) -> Vec<Vec<EdgeId>> {
        self.spawned
            .iter()
            .map(|parts| {
                parts
                    .iter()
                    .flat_map(|sp| {
                        let block = &self.blocks[sp.block];
                        paths[sp.block][sp.local].iter().map(|&le| block.edges[le])
                    })
                    .collect()
            })
            .collect()
    }
}

/// Splits an instance into blocks and spawns every demand into the blocks its
/// endpoints separate. Demands that contract to loops in a block are dropped
/// there, so every spawned demand has distinct endpoints.
pub fn block_decompose(instance: &OuterplanarInstance, demands: &DemandSet) -> BlockDecomposition {
    decompose_general(instance.n(), instance.edges(), demands.as_slice())
        .expect("validated instances are connected")
}

/// Block decomposition of an arbitrary (possibly disconnected) multigraph.
/// Fails with the id of a demand whose endpoints lie in different components.
pub(crate) fn decompose_general(
    n: usize,
    edges: &[Edge],
    demands: &[Demand],
) -> Result<BlockDecomposition, usize> {
    let parts = decompose_parts(n, edges);
    let mut blocks_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, (nodes, _)) in parts.iter().enumerate() {
        for &v in nodes {
            blocks_of[v].push(b);
        }
    }

    let mut blocks: Vec<Block> = parts
        .into_iter()
        .map(|(nodes, ids)| {
            let local = local_index(n, &nodes);
            let local_edges = ids
                .iter()
                .map(|&id| {
                    let e = &edges[id];
                    Edge::new(local[e.a], local[e.b], e.capacity)
                })
                .collect();
            Block {
                kind: if ids.len() == 1 {
                    BlockKind::Bridge
                } else {
                    BlockKind::Biconnected
                },
                instance: OuterplanarInstance::from_parts_unchecked(nodes.len(), local_edges),
                nodes,
                edges: ids,
                demands: DemandSet::empty(),
                origin: Vec::new(),
            }
        })
        .collect();

    let n_blocks = blocks.len();
    let mut block_cuts: Vec<Vec<NodeId>> = vec![Vec::new(); n_blocks];
    for (v, bs) in blocks_of.iter().enumerate() {
        if bs.len() > 1 {
            for &b in bs {
                block_cuts[b].push(v);
            }
        }
    }
    let mut local_demands: Vec<Vec<Demand>> = vec![Vec::new(); n_blocks];
    let mut spawned = Vec::with_capacity(demands.len());
    for (id, d) in demands.iter().enumerate() {
        let route = block_route(&blocks_of, &block_cuts, d.source, d.target).ok_or(id)?;
        let mut parts = Vec::with_capacity(route.len());
        for (b, entry, exit) in route {
            let block = &mut blocks[b];
            let la = block.nodes.binary_search(&entry).expect("entry in block");
            let lb = block.nodes.binary_search(&exit).expect("exit in block");
            parts.push(SpawnedDemand {
                block: b,
                local: local_demands[b].len(),
            });
            local_demands[b].push(Demand::new(la, lb, d.profit));
            block.origin.push(id);
        }
        spawned.push(parts);
    }
    for (block, ds) in blocks.iter_mut().zip(local_demands) {
        block.demands = DemandSet::from_vec_unchecked(ds);
    }
    Ok(BlockDecomposition { blocks, spawned })
}

/// Walks the block-cut tree from `s` to `t`, returning `(block, entry, exit)`
/// for every block on the way.
fn block_route(
    blocks_of: &[Vec<usize>],
    block_cuts: &[Vec<NodeId>],
    s: NodeId,
    t: NodeId,
) -> Option<Vec<(usize, NodeId, NodeId)>> {
    // Block-cut tree nodes: blocks are 0..n_blocks, node v is n_blocks + v.
    let n_blocks = block_cuts.len();
    let start = tree_node(blocks_of, n_blocks, s)?;
    let goal = tree_node(blocks_of, n_blocks, t)?;
    let mut prev = std::collections::HashMap::new();
    prev.insert(start, start);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if x == goal {
            break;
        }
        let next: Vec<usize> = if x < n_blocks {
            block_cuts[x].iter().map(|&v| n_blocks + v).collect()
        } else {
            blocks_of[x - n_blocks].clone()
        };
        for y in next {
            if let std::collections::hash_map::Entry::Vacant(slot) = prev.entry(y) {
                slot.insert(x);
                queue.push_back(y);
            }
        }
    }
    if !prev.contains_key(&goal) {
        return None;
    }
    let mut path = vec![goal];
    while *path.last().unwrap() != start {
        path.push(prev[path.last().unwrap()]);
    }
    path.reverse();

    let mut route = Vec::new();
    let mut entry = s;
    for (i, &x) in path.iter().enumerate() {
        if x < n_blocks {
            let exit = match path.get(i + 1) {
                Some(&y) => y - n_blocks,
                None => t,
            };
            route.push((x, entry, exit));
            entry = exit;
        }
    }
    Some(route)
}

fn tree_node(blocks_of: &[Vec<usize>], n_blocks: usize, v: NodeId) -> Option<usize> {
    match blocks_of[v].len() {
        0 => None,
        1 => Some(blocks_of[v][0]),
        _ => Some(n_blocks + v),
    }
}

/// Biconnected components as `(sorted nodes, sorted edge ids)`. Isolated
/// nodes belong to no block. Parallel edges are handled by edge id, so a
/// bundle of parallel edges forms one block.
pub(crate) fn decompose_parts(n: usize, edges: &[Edge]) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
    let adj = adjacency(n, edges);
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut out = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (node, edge used to enter it, next adjacency index)
        let mut stack: Vec<(NodeId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (v, via, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let (w, e) = adj[v][*next];
                *next += 1;
                if Some(e) == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(e), Some(&(u, _, _))) = (via, stack.last()) {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut ids = Vec::new();
                        while let Some(top) = edge_stack.pop() {
                            ids.push(top);
                            if top == e {
                                break;
                            }
                        }
                        ids.sort_unstable();
                        let mut nodes: Vec<NodeId> =
                            ids.iter().flat_map(|&id| [edges[id].a, edges[id].b]).collect();
                        nodes.sort_unstable();
                        nodes.dedup();
                        out.push((nodes, ids));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Scans chords `(a, b, tag)` with `a < b` for a crossing pair, i.e. two chords
/// whose endpoints strictly interleave. Returns the tags of the first pair
/// found. Chords sharing an endpoint never cross.
pub(crate) fn find_crossing<T: Copy>(chords: &mut [(usize, usize, T)]) -> Option<(T, T)> {
    chords.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    let mut open: Vec<(usize, usize, T)> = Vec::new();
    for &(a, b, tag) in chords.iter() {
        while open.last().is_some_and(|top| top.1 <= a) {
            open.pop();
        }
        if let Some(top) = open.last() {
            if top.1 < b {
                return Some((top.2, tag));
            }
        }
        open.push((a, b, tag));
    }
    None
}

/// Extends a shore of a block to the whole graph: every node joins the side
/// of the block node it hangs off once the block's own edges are removed.
pub(crate) fn lift_shore(
    n: usize,
    edges: &[Edge],
    block: &Block,
    local_shore: &[bool],
) -> Vec<NodeId> {
    let mut in_block = vec![false; edges.len()];
    for &id in &block.edges {
        in_block[id] = true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (id, e) in edges.iter().enumerate() {
        if !in_block[id] {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            parent[ra] = rb;
        }
    }
    let mut side = vec![None; n];
    for (i, &v) in block.nodes.iter().enumerate() {
        let r = find(&mut parent, v);
        side[r] = Some(local_shore[i]);
    }
    (0..n)
        .filter(|&v| {
            let r = find(&mut parent, v);
            side[r] == Some(true)
        })
        .collect()
}
