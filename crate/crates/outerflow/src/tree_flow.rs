//! Edge-disjoint paths on a capacitated tree, where every demand has exactly
//! one candidate path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::TreeError;
use crate::graph::{Demand, NodeId};

/// Demand count above which [`exact_tree_edp`] refuses to run.
pub const EXACT_DEMAND_LIMIT: usize = 24;

/// A tree on nodes `0..n` with capacities `û >= 0`, rooted at node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    n: usize,
    edges: Vec<(NodeId, NodeId, u64)>,
    parent: Vec<Option<(NodeId, usize)>>,
    depth: Vec<usize>,
}

impl TreeInstance {
    pub fn new(n: usize, edges: &[(NodeId, NodeId, u64)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        for (id, &(a, b, _)) in edges.iter().enumerate() {
            for node in [a, b] {
                if node >= n {
                    return Err(TreeError::NodeOutOfRange { edge: id, node, n });
                }
            }
        }
        if edges.len() + 1 != n {
            return Err(TreeError::NotATree);
        }
        let mut adj = vec![Vec::new(); n];
        for (id, &(a, b, _)) in edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for &(w, id) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, id));
                    depth[w] = depth[v] + 1;
                    stack.push(w);
                }
            }
        }
        if seen.contains(&false) {
            return Err(TreeError::NotATree);
        }
        Ok(TreeInstance {
            n,
            edges: edges.to_vec(),
            parent,
            depth,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(NodeId, NodeId, u64)] {
        &self.edges
    }

    pub fn capacity(&self, edge: usize) -> u64 {
        self.edges[edge].2
    }

    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root").0;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root").0;
        }
        while a != b {
            a = self.parent[a].expect("non-root").0;
            b = self.parent[b].expect("non-root").0;
        }
        a
    }

    /// Edge ids of the unique path, in order from `a` to `b`.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<usize> {
        let top = self.lca(a, b);
        let climb = |mut v: NodeId| {
            let mut out = Vec::new();
            while v != top {
                let (p, e) = self.parent[v].expect("non-root");
                out.push(e);
                v = p;
            }
            out
        };
        let mut up = climb(a);
        let mut down = climb(b);
        down.reverse();
        up.extend(down);
        up
    }

    fn check(&self, demands: &[Demand]) -> Result<(), TreeError> {
        for (k, d) in demands.iter().enumerate() {
            for node in [d.source, d.target] {
                if node >= self.n {
                    return Err(TreeError::EndpointNotInTree { demand: k, node });
                }
            }
        }
        Ok(())
    }
}

/// Number of demands whose tree path uses each edge.
pub fn tree_route_load(tree: &TreeInstance, demands: &[Demand]) -> Result<Vec<u64>, TreeError> {
    tree.check(demands)?;
    let mut load = vec![0u64; tree.edges.len()];
    for d in demands {
        for e in tree.path(d.source, d.target) {
            load[e] += 1;
        }
    }
    Ok(load)
}

pub fn is_routable_in_tree(tree: &TreeInstance, demands: &[Demand]) -> Result<bool, TreeError> {
    let load = tree_route_load(tree, demands)?;
    Ok(load.iter().enumerate().all(|(e, &l)| l <= tree.capacity(e)))
}

/// A routable set of demands with their tree paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeSelection {
    /// Selected demand ids, ascending.
    pub selected: Vec<usize>,
    pub profit: u64,
    /// Tree edge ids of each selected demand's path, source to target.
    pub paths: Vec<Vec<usize>>,
}

impl TreeSelection {
    fn from_ids(tree: &TreeInstance, demands: &[Demand], mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        TreeSelection {
            profit: ids.iter().map(|&k| demands[k].profit).sum(),
            paths: ids
                .iter()
                .map(|&k| tree.path(demands[k].source, demands[k].target))
                .collect(),
            selected: ids,
        }
    }
}

/// Demand ids sorted by deepest LCA, then higher profit, then lower id.
fn lca_order(tree: &TreeInstance, demands: &[Demand]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    let depth: Vec<usize> = demands
        .iter()
        .map(|d| tree.depth[tree.lca(d.source, d.target)])
        .collect();
    order.sort_by(|&x, &y| {
        depth[y]
            .cmp(&depth[x])
            .then(demands[y].profit.cmp(&demands[x].profit))
            .then(x.cmp(&y))
    });
    order
}

/// Greedy packing in deepest-LCA order: a demand is taken when its path
/// still has residual capacity. If the best single routable demand is worth
/// more than the packing, it is returned instead.
pub fn greedy_tree_edp(tree: &TreeInstance, demands: &[Demand]) -> Result<TreeSelection, TreeError> {
    tree.check(demands)?;
    let paths: Vec<Vec<usize>> = demands.iter().map(|d| tree.path(d.source, d.target)).collect();
    let mut residual: Vec<u64> = tree.edges.iter().map(|e| e.2).collect();
    let mut taken = Vec::new();
    for k in lca_order(tree, demands) {
        if paths[k].iter().all(|&e| residual[e] > 0) {
            for &e in &paths[k] {
                residual[e] -= 1;
            }
            taken.push(k);
        }
    }
    let packed = TreeSelection::from_ids(tree, demands, taken);
    let single = (0..demands.len())
        .filter(|&k| paths[k].iter().all(|&e| tree.capacity(e) > 0))
        .max_by(|&x, &y| demands[x].profit.cmp(&demands[y].profit).then(y.cmp(&x)));
    match single {
        Some(k) if demands[k].profit > packed.profit => Ok(TreeSelection::from_ids(tree, demands, vec![k])),
        _ => Ok(packed),
    }
}

/// Maximum-profit routable subset by branch and bound.
pub fn exact_tree_edp(tree: &TreeInstance, demands: &[Demand]) -> Result<TreeSelection, TreeError> {
    exact_tree_edp_with_limit(tree, demands, EXACT_DEMAND_LIMIT)
}

pub fn exact_tree_edp_with_limit(
    tree: &TreeInstance,
    demands: &[Demand],
    limit: usize,
) -> Result<TreeSelection, TreeError> {
    tree.check(demands)?;
    if demands.len() > limit {
        return Err(TreeError::TooManyDemands {
            count: demands.len(),
            limit,
        });
    }
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&x, &y| demands[y].profit.cmp(&demands[x].profit).then(x.cmp(&y)));
    let paths: Vec<Vec<usize>> = order
        .iter()
        .map(|&k| tree.path(demands[k].source, demands[k].target))
        .collect();
    let profit: Vec<u64> = order.iter().map(|&k| demands[k].profit).collect();
    // suffix[i] = total profit of order[i..]
    let mut suffix = vec![0u64; order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = suffix[i + 1] + profit[i];
    }

    struct Search<'a> {
        paths: &'a [Vec<usize>],
        profit: &'a [u64],
        suffix: &'a [u64],
        residual: Vec<u64>,
        current: Vec<usize>,
        value: u64,
        best: Vec<usize>,
        best_value: u64,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize) {
            if self.value > self.best_value || (self.value == self.best_value && self.best.is_empty()) {
                self.best_value = self.value;
                self.best = self.current.clone();
            }
            if i == self.paths.len() || self.value + self.suffix[i] <= self.best_value {
                return;
            }
            if self.paths[i].iter().all(|&e| self.residual[e] > 0) {
                for &e in &self.paths[i] {
                    self.residual[e] -= 1;
                }
                self.current.push(i);
                self.value += self.profit[i];
                self.go(i + 1);
                self.value -= self.profit[i];
                self.current.pop();
                for &e in &self.paths[i] {
                    self.residual[e] += 1;
                }
            }
            self.go(i + 1);
        }
    }

    let mut search = Search {
        paths: &paths,
        profit: &profit,
        suffix: &suffix,
        residual: tree.edges.iter().map(|e| e.2).collect(),
        current: Vec::new(),
        value: 0,
        best: Vec::new(),
        best_value: 0,
    };
    search.go(0);
    let ids = search.best.iter().map(|&i| order[i]).collect();
    Ok(TreeSelection::from_ids(tree, demands, ids))
}

/// Demand classes, each routable in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Partition {
    pub classes: Vec<Vec<usize>>,
    /// The load factor used: every edge carries at most `k * û(e)` demands.
    #[serde(with = "crate::rational::serde_text")]
    pub k: BigRational,
    /// `ceil(4k)`, for comparison with the class count.
    pub reference_bound: u64,
}

/// Smallest `k` with `load(e) <= k * û(e)` on every edge.
pub fn load_factor(tree: &TreeInstance, demands: &[Demand]) -> Result<BigRational, TreeError> {
    let load = tree_route_load(tree, demands)?;
    let mut k = BigRational::zero();
    for (e, &l) in load.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let c = tree.capacity(e);
        if c == 0 {
            return Err(TreeError::PreconditionLoadExceeded {
                edge: e,
                load: l,
                capacity: 0,
            });
        }
        k = k.max(BigRational::new(BigInt::from(l), BigInt::from(c)));
    }
    Ok(k)
}

/// First-fit assignment in deepest-LCA order (ties by id) into the earliest
/// class that stays routable. With `k = None` the load factor is computed.
pub fn first_fit_partition(
    tree: &TreeInstance,
    demands: &[Demand],
    k: Option<BigRational>,
) -> Result<Partition, TreeError> {
    let load = tree_route_load(tree, demands)?;
    let k = match k {
        None => load_factor(tree, demands)?,
        Some(k) => {
            for (e, &l) in load.iter().enumerate() {
                let cap = BigRational::from_integer(BigInt::from(tree.capacity(e)));
                if BigRational::from_integer(BigInt::from(l)) > &k * cap {
                    return Err(TreeError::PreconditionLoadExceeded {
                        edge: e,
                        load: l,
                        capacity: tree.capacity(e),
                    });
                }
            }
            k
        }
    };
    let depth: Vec<usize> = demands
        .iter()
        .map(|d| tree.depth[tree.lca(d.source, d.target)])
        .collect();
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&x, &y| depth[y].cmp(&depth[x]).then(x.cmp(&y)));

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut residual: Vec<Vec<u64>> = Vec::new();
    for k in order {
        let path = tree.path(demands[k].source, demands[k].target);
        let slot = residual
            .iter()
            .position(|r| path.iter().all(|&e| r[e] > 0))
            .unwrap_or_else(|| {
                classes.push(Vec::new());
                residual.push(tree.edges.iter().map(|e| e.2).collect());
                classes.len() - 1
            });
        for &e in &path {
            residual[slot][e] -= 1;
        }
        classes[slot].push(k);
    }
    for class in &mut classes {
        class.sort_unstable();
    }
    let four_k = &k * BigRational::from_integer(BigInt::from(4));
    let reference_bound = four_k.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    Ok(Partition {
        classes,
        k,
        reference_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> TreeInstance {
        TreeInstance::new(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap()
    }

    fn star() -> TreeInstance {
        // Center 0, leaves 1, 2, 3.
        TreeInstance::new(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap()
    }

    fn d(s: usize, t: usize, p: u64) -> Demand {
        Demand::new(s, t, p)
    }

    #[test]
    fn loads() {
        let t = TreeInstance::new(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(tree_route_load(&t, &[d(0, 2, 1)]).unwrap(), vec![1, 1]);
        assert_eq!(tree_route_load(&star(), &[d(1, 2, 1), (d(2, 3, 1))]).unwrap(), vec![1, 2, 1]);
        assert_eq!(tree_route_load(&star(), &[]).unwrap(), vec![0, 0, 0]);
        assert_eq!(
            tree_route_load(&star(), &[d(1, 7, 1)]),
            Err(TreeError::EndpointNotInTree { demand: 0, node: 7 })
        );
    }

    #[test]
    fn routability() {
        assert!(is_routable_in_tree(&path4(), &[d(0, 2, 1)]).unwrap());
        assert!(!is_routable_in_tree(&star(), &[d(1, 2, 1), d(2, 3, 1)]).unwrap());
        assert!(is_routable_in_tree(&star(), &[]).unwrap());
    }

    #[test]
    fn path_order() {
        let t = path4();
        assert_eq!(t.path(3, 0), vec![2, 1, 0]);
        assert_eq!(t.path(1, 3), vec![1, 2]);
        assert_eq!(star().path(1, 3), vec![0, 2]);
    }

    #[test]
    fn rejects_non_trees() {
        assert_eq!(TreeInstance::new(3, &[(0, 1, 1)]), Err(TreeError::NotATree));
        assert_eq!(
            TreeInstance::new(4, &[(0, 1, 1), (1, 0, 1), (2, 3, 1)]),
            Err(TreeError::NotATree)
        );
        assert_eq!(TreeInstance::new(0, &[]), Err(TreeError::Empty));
    }

    #[test]
    fn greedy_and_exact_on_path() {
        let ds = [d(0, 2, 2), d(1, 3, 3), d(0, 3, 4)];
        let exact = exact_tree_edp(&path4(), &ds).unwrap();
        assert_eq!((exact.profit, exact.selected.clone()), (4, vec![2]));
        let greedy = greedy_tree_edp(&path4(), &ds).unwrap();
        assert!(is_routable_in_tree(&path4(), &greedy.selected.iter().map(|&k| ds[k]).collect::<Vec<_>>()).unwrap());
        assert!(greedy.profit >= 4);
    }

    #[test]
    fn disjoint_demands_both_taken() {
        let ds = [d(0, 1, 1), d(2, 3, 1)];
        assert_eq!(greedy_tree_edp(&path4(), &ds).unwrap().profit, 2);
        assert_eq!(exact_tree_edp(&path4(), &ds).unwrap().profit, 2);
        assert!(greedy_tree_edp(&path4(), &[]).unwrap().selected.is_empty());
    }

    #[test]
    fn star_optimum_is_one() {
        let ds = [d(1, 2, 1), d(2, 3, 1), d(1, 3, 1)];
        assert_eq!(exact_tree_edp(&star(), &ds).unwrap().profit, 1);
    }

    #[test]
    fn zero_capacities() {
        let t = TreeInstance::new(3, &[(0, 1, 0), (1, 2, 0)]).unwrap();
        let ds = [d(0, 2, 5)];
        let e = exact_tree_edp(&t, &ds).unwrap();
        assert_eq!((e.profit, e.selected.len()), (0, 0));
        assert_eq!(greedy_tree_edp(&t, &ds).unwrap().profit, 0);
    }

    #[test]
    fn exact_limit() {
        let ds = vec![d(0, 1, 1); 25];
        assert_eq!(
            exact_tree_edp(&path4(), &ds),
            Err(TreeError::TooManyDemands { count: 25, limit: 24 })
        );
    }

    #[test]
    fn partition_examples() {
        let p = first_fit_partition(&star(), &[d(1, 2, 1), d(2, 3, 1)], None).unwrap();
        assert_eq!(p.classes, vec![vec![0], vec![1]]);
        assert_eq!(p.k, BigRational::from_integer(2.into()));
        assert_eq!(p.reference_bound, 8);
        let p = first_fit_partition(&path4(), &[d(0, 1, 1), d(1, 3, 1)], None).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1]]);
        let p = first_fit_partition(&path4(), &[], None).unwrap();
        assert!(p.classes.is_empty());
        assert_eq!(
            first_fit_partition(&star(), &[d(1, 2, 1), d(2, 3, 1)], Some(BigRational::from_integer(1.into()))),
            Err(TreeError::PreconditionLoadExceeded { edge: 1, load: 2, capacity: 1 })
        );
    }
}
