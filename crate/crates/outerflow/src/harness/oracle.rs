//! Exact maximum-profit edge-disjoint paths by exhaustive search.

use serde::Serialize;

use crate::error::OracleError;
use crate::graph::{Demand, DemandSet, EdgeId, NodeId, OuterplanarInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub nodes: usize,
    pub demands: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { nodes: 10, demands: 6 }
    }
}

/// An optimal routable subset with witness paths (edge ids, source first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleResult {
    pub profit: u64,
    pub selected: Vec<usize>,
    pub paths: Vec<Vec<EdgeId>>,
}

pub fn oracle_edp(instance: &OuterplanarInstance, demands: &DemandSet) -> Result<OracleResult, OracleError> {
    oracle_edp_with_limits(instance, demands, OracleLimits::default())
}

/// Subsets are tried by decreasing profit (larger subsets first on ties), so
/// the first routable one is optimal. Routability is decided by backtracking
/// over simple paths in the graph with parallel edges merged.
pub fn oracle_edp_with_limits(
    instance: &OuterplanarInstance,
    demands: &DemandSet,
    limits: OracleLimits,
) -> Result<OracleResult, OracleError> {
    let (n, k) = (instance.n(), demands.len());
    if n > limits.nodes || k > limits.demands || k >= 32 {
        return Err(OracleError::TooLarge { nodes: n, demands: k });
    }
    let ds = demands.as_slice();
    let mut masks: Vec<u32> = (0..1u32 << k).collect();
    let profit = |m: u32| (0..k).filter(|&i| m >> i & 1 == 1).map(|i| ds[i].profit).sum::<u64>();
    masks.sort_by(|&x, &y| {
        profit(y)
            .cmp(&profit(x))
            .then(y.count_ones().cmp(&x.count_ones()))
            .then(x.cmp(&y))
    });
    let graph = Merged::new(instance);
    for mask in masks {
        let selected: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let subset: Vec<Demand> = selected.iter().map(|&i| ds[i]).collect();
        if let Some(paths) = graph.route(&subset) {
            return Ok(OracleResult {
                profit: profit(mask),
                selected,
                paths,
            });
        }
    }
    unreachable!("the empty subset is always routable")
}

/// The instance with parallel edges merged into one link per node pair.
struct Merged<'a> {
    instance: &'a OuterplanarInstance,
    /// `(neighbour, link id)` per node.
    adj: Vec<Vec<(NodeId, usize)>>,
    /// Capacity and member edge ids (ascending) per link.
    links: Vec<(u64, Vec<EdgeId>)>,
}

impl<'a> Merged<'a> {
    fn new(instance: &'a OuterplanarInstance) -> Self {
        let n = instance.n();
        let mut index = std::collections::BTreeMap::new();
        let mut links: Vec<(u64, Vec<EdgeId>)> = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for (id, e) in instance.edges().iter().enumerate() {
            let l = *index.entry((e.a, e.b)).or_insert_with(|| {
                links.push((0, Vec::new()));
                adj[e.a].push((e.b, links.len() - 1));
                adj[e.b].push((e.a, links.len() - 1));
                links.len() - 1
            });
            links[l].0 += e.capacity;
            links[l].1.push(id);
        }
        Merged { instance, adj, links }
    }

    /// Paths for all demands, or `None` if they cannot be routed together.
    fn route(&self, demands: &[Demand]) -> Option<Vec<Vec<EdgeId>>> {
        let mut residual: Vec<u64> = self.links.iter().map(|l| l.0).collect();
        // Cheap necessary check: degree cuts around single nodes.
        let mut need = vec![0u64; self.instance.n()];
        for d in demands {
            need[d.source] += 1;
            need[d.target] += 1;
        }
        for (v, &r) in need.iter().enumerate() {
            if r > self.adj[v].iter().map(|&(_, l)| residual[l]).sum::<u64>() {
                return None;
            }
        }
        let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(demands.len());
        if !self.search(demands, 0, &mut residual, &mut chosen) {
            return None;
        }
        // Spread link usage over member edges, lowest id first.
        let mut left: Vec<Vec<(EdgeId, u64)>> = self
            .links
            .iter()
            .map(|(_, ids)| ids.iter().map(|&e| (e, self.instance.edge(e).capacity)).collect())
            .collect();
        Some(
            chosen
                .iter()
                .map(|links| {
                    links
                        .iter()
                        .map(|&l| {
                            let slot = left[l].iter_mut().find(|(_, c)| *c > 0).expect("capacity left");
                            slot.1 -= 1;
                            slot.0
                        })
                        .collect()
                })
                .collect(),
        )
    }

    fn search(&self, demands: &[Demand], i: usize, residual: &mut Vec<u64>, chosen: &mut Vec<Vec<usize>>) -> bool {
        if i == demands.len() {
            return true;
        }
        let (s, t) = (demands[i].source, demands[i].target);
        let mut on_path = vec![false; self.instance.n()];
        let mut path: Vec<usize> = Vec::new();
        on_path[s] = true;
        self.paths_from(s, t, residual, &mut on_path, &mut path, &mut |residual, path| {
            chosen.push(path.to_vec());
            let ok = self.search(demands, i + 1, residual, chosen);
            if !ok {
                chosen.pop();
            }
            ok
        })
    }

    /// Calls `done` on every simple path from `v` to `t` over links with
    /// residual capacity, with that capacity taken; stops at the first
    /// `true`.
    fn paths_from(
        &self,
        v: NodeId,
        t: NodeId,
        residual: &mut Vec<u64>,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        done: &mut dyn FnMut(&mut Vec<u64>, &[usize]) -> bool,
    ) -> bool {
        if v == t {
            return done(residual, path);
        }
        for &(w, l) in &self.adj[v] {
            if on_path[w] || residual[l] == 0 {
                continue;
            }
            residual[l] -= 1;
            on_path[w] = true;
            path.push(l);
            let found = self.paths_from(w, t, residual, on_path, path, done);
            path.pop();
            on_path[w] = false;
            residual[l] += 1;
            if found {
                return true;
            }
        }
        false
    }
}
