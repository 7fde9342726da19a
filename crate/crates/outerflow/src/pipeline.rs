//! Maximum-profit edge-disjoint paths on an outerplanar instance through a
//! single-subtree sparsifier.
//!
//! 1. Build the integer sparsifier `(T, û)`.
//! 2. Select a routable demand set on the tree.
//! 3. Route `û(e)` copies of every tree edge `e` in the graph; the tree
//!    edges are parallel to graph edges and `û` is conservative, so this
//!    always succeeds.
//! 4. Replace every tree edge on a selected tree path by one of its graph
//!    paths and trim the result to a simple path.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::PipelineError;
use crate::graph::{Demand, DemandSet, EdgeId, NodeId, OuterplanarInstance};
use crate::rational::serde_text;
use crate::router::{route_all, walk_nodes, RouteOptions};
use crate::sparsifier::{cut_ratio_report, sparsify, NumericMode, SubtreeSparsifier};
use crate::tree_flow::{exact_tree_edp, greedy_tree_edp, TreeInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Deepest-LCA packing, or the best single demand if that is worth more.
    Greedy,
    /// Branch and bound over all subsets on the tree.
    Exact,
}

/// Graph paths for every unit of tree capacity: `paths[e]` holds `û(e)`
/// edge-disjoint walks from `edge(e).a` to `edge(e).b`, for every instance
/// edge id `e` (empty off the tree).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PathBank {
    pub paths: Vec<Vec<Vec<EdgeId>>>,
}

/// Routes `û(e)` copies of every tree edge as demands in the graph.
pub fn route_tree_capacities(
    instance: &OuterplanarInstance,
    sparsifier: &SubtreeSparsifier,
) -> Result<PathBank, PipelineError> {
    let caps = sparsifier
        .integer_capacities()
        .ok_or_else(|| PipelineError::Verification("sparsifier capacities are not integral".into()))?;
    let mut owner = Vec::new();
    let mut demands = Vec::new();
    for &(e, c) in &caps {
        let edge = instance.edge(e);
        for _ in 0..c {
            owner.push(e);
            demands.push(Demand::new(edge.a, edge.b, 1));
        }
    }
    let solution = route_all(instance, &DemandSet::from_vec_unchecked(demands), RouteOptions::default())?;
    let mut paths = vec![Vec::new(); instance.edges().len()];
    for (e, p) in owner.into_iter().zip(solution.paths) {
        paths[e].push(p.edges);
    }
    Ok(PathBank { paths })
}

/// Cuts closed detours out of a walk: whenever a node repeats, everything
/// since its first visit is dropped.
pub fn trim_walk(instance: &OuterplanarInstance, source: NodeId, walk: &[EdgeId]) -> Vec<EdgeId> {
    let mut first_visit = vec![usize::MAX; instance.n()];
    first_visit[source] = 0;
    let mut nodes = vec![source];
    let mut edges: Vec<EdgeId> = Vec::new();
    for &e in walk {
        let next = instance.edge(e).other(*nodes.last().expect("non-empty"));
        if first_visit[next] != usize::MAX {
            let keep = first_visit[next];
            for &v in &nodes[keep + 1..] {
                first_visit[v] = usize::MAX;
            }
            nodes.truncate(keep + 1);
            edges.truncate(keep);
        } else {
            first_visit[next] = nodes.len();
            nodes.push(next);
            edges.push(e);
        }
    }
    edges
}

/// Replaces every tree edge on each tree path (instance edge ids, in order
/// from the demand's source) by the next unused bank path for that edge.
pub fn compose_paths(
    instance: &OuterplanarInstance,
    demands: &[Demand],
    tree_paths: &[Vec<EdgeId>],
    bank: &PathBank,
) -> Result<Vec<Vec<EdgeId>>, PipelineError> {
    let mut next = vec![0usize; bank.paths.len()];
    let mut out = Vec::with_capacity(tree_paths.len());
    for (d, tree_path) in demands.iter().zip(tree_paths) {
        let mut at = d.source;
        let mut walk = Vec::new();
        for &e in tree_path {
            let piece = bank.paths[e]
                .get(next[e])
                .ok_or(PipelineError::BankExhausted(e))?;
            next[e] += 1;
            let edge = instance.edge(e);
            if at == edge.a {
                walk.extend(piece);
                at = edge.b;
            } else {
                walk.extend(piece.iter().rev());
                at = edge.a;
            }
        }
        out.push(trim_walk(instance, d.source, &walk));
    }
    Ok(out)
}

/// Something wrong with a claimed routing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    UnknownDemand { demand: usize },
    DuplicateDemand { demand: usize },
    UnknownEdge { demand: usize, edge: EdgeId },
    Broken { demand: usize, edge: EdgeId },
    WrongEndpoint { demand: usize, reached: NodeId },
    NotSimple { demand: usize, node: NodeId },
    OverCapacity { edge: EdgeId, used: u64, capacity: u64 },
}

/// Checks that `paths[k]` is a simple path for demand `selected[k]` and that
/// no edge is used beyond its capacity.
pub fn verify_solution(
    instance: &OuterplanarInstance,
    demands: &[Demand],
    selected: &[usize],
    paths: &[Vec<EdgeId>],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut load = vec![0u64; instance.edges().len()];
    let mut seen_demand = vec![false; demands.len()];
    for (&k, path) in selected.iter().zip(paths) {
        let Some(d) = demands.get(k) else {
            out.push(Violation::UnknownDemand { demand: k });
            continue;
        };
        if std::mem::replace(&mut seen_demand[k], true) {
            out.push(Violation::DuplicateDemand { demand: k });
        }
        let mut visited = vec![false; instance.n()];
        visited[d.source] = true;
        let mut at = d.source;
        let mut ok = true;
        for &e in path {
            let Some(edge) = instance.edges().get(e) else {
                out.push(Violation::UnknownEdge { demand: k, edge: e });
                ok = false;
                break;
            };
            if edge.a != at && edge.b != at {
                out.push(Violation::Broken { demand: k, edge: e });
                ok = false;
                break;
            }
            at = edge.other(at);
            load[e] += 1;
            if std::mem::replace(&mut visited[at], true) {
                out.push(Violation::NotSimple { demand: k, node: at });
            }
        }
        if ok && at != d.target {
            out.push(Violation::WrongEndpoint { demand: k, reached: at });
        }
    }
    if selected.len() != paths.len() {
        out.push(Violation::UnknownDemand {
            demand: selected.len().min(paths.len()),
        });
    }
    for (e, &used) in load.iter().enumerate() {
        let capacity = instance.edge(e).capacity;
        if used > capacity {
            out.push(Violation::OverCapacity { edge: e, used, capacity });
        }
    }
    out
}

/// Summary numbers of one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineStats {
    pub profit: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_profit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", with = "optional_text")]
    pub ratio: Option<BigRational>,
    pub tree_edges: Vec<EdgeId>,
    #[serde(with = "serde_text")]
    pub sparsifier_min_ratio: BigRational,
    pub selection: Selection,
    pub tree_profit: u64,
}

impl PipelineStats {
    /// Records the optimum and the achieved fraction of it.
    pub fn with_oracle(mut self, optimum: u64) -> Self {
        self.oracle_profit = Some(optimum);
        self.ratio = (optimum > 0).then(|| BigRational::new(self.profit.into(), optimum.into()));
        self
    }
}

mod optional_text {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&crate::rational::to_string(q)),
            None => s.serialize_none(),
        }
    }
}

/// Selected demands and their graph paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EdpSolution {
    pub selected: Vec<usize>,
    pub paths: Vec<SolutionPath>,
    pub stats: PipelineStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionPath {
    pub demand: usize,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl EdpSolution {
    pub fn edge_paths(&self) -> Vec<Vec<EdgeId>> {
        self.paths.iter().map(|p| p.edges.clone()).collect()
    }
}

/// The tree `(T, û)` as a [`TreeInstance`]; tree edge `k` is instance edge
/// `sparsifier.tree_edges[k]`.
pub fn tree_of(
    instance: &OuterplanarInstance,
    sparsifier: &SubtreeSparsifier,
) -> Result<TreeInstance, PipelineError> {
    let caps = sparsifier
        .integer_capacities()
        .ok_or_else(|| PipelineError::Verification("sparsifier capacities are not integral".into()))?;
    let edges: Vec<_> = caps
        .iter()
        .map(|&(e, c)| {
            let edge = instance.edge(e);
            (edge.a, edge.b, c)
        })
        .collect();
    Ok(TreeInstance::new(instance.n(), &edges)?)
}

/// Runs the whole pipeline and verifies the output.
pub fn solve_edp(
    instance: &OuterplanarInstance,
    demands: &DemandSet,
    selection: Selection,
) -> Result<EdpSolution, PipelineError> {
    let (_, sparsifier) = sparsify(instance, NumericMode::Integer)?;
    let report = cut_ratio_report(instance, &sparsifier);
    let tree = tree_of(instance, &sparsifier)?;
    let ds = demands.as_slice();
    let chosen = match selection {
        Selection::Greedy => greedy_tree_edp(&tree, ds)?,
        Selection::Exact => exact_tree_edp(&tree, ds)?,
    };
    let bank = route_tree_capacities(instance, &sparsifier)?;
    let tree_paths: Vec<Vec<EdgeId>> = chosen
        .paths
        .iter()
        .map(|p| p.iter().map(|&k| sparsifier.tree_edges[k]).collect())
        .collect();
    let selected_demands: Vec<Demand> = chosen.selected.iter().map(|&k| ds[k]).collect();
    let paths = compose_paths(instance, &selected_demands, &tree_paths, &bank)?;
    let violations = verify_solution(instance, ds, &chosen.selected, &paths);
    if let Some(v) = violations.first() {
        return Err(PipelineError::Verification(format!("{v:?}")));
    }
    let profit = chosen.profit;
    Ok(EdpSolution {
        paths: chosen
            .selected
            .iter()
            .zip(paths)
            .map(|(&k, edges)| SolutionPath {
                demand: k,
                nodes: walk_nodes(instance, ds[k].source, &edges),
                edges,
            })
            .collect(),
        selected: chosen.selected,
        stats: PipelineStats {
            profit,
            oracle_profit: None,
            ratio: None,
            tree_edges: sparsifier.tree_edges.clone(),
            sparsifier_min_ratio: report.min_ratio,
            selection,
            tree_profit: chosen.profit,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_bank_is_identity() {
        let g = OuterplanarInstance::cycle(4);
        let (_, t) = sparsify(&g, NumericMode::Integer).unwrap();
        let bank = route_tree_capacities(&g, &t).unwrap();
        assert_eq!(bank.paths, vec![vec![], vec![vec![1]], vec![vec![2]], vec![vec![3]]]);
    }

    #[test]
    fn zero_sparsifier_gives_empty_bank() {
        let g = OuterplanarInstance::cycle(4);
        let t = SubtreeSparsifier {
            mode: NumericMode::Integer,
            tree_edges: vec![0, 1, 2],
            fillers: vec![0, 1, 2],
            capacity: vec![BigRational::from_integer(0.into()); 4],
        };
        let bank = route_tree_capacities(&g, &t).unwrap();
        assert!(bank.paths.iter().all(Vec::is_empty));
    }

    #[test]
    fn compose_identity() {
        let g = OuterplanarInstance::cycle(4);
        let bank = PathBank {
            paths: vec![vec![vec![0]], vec![vec![1]], vec![], vec![]],
        };
        let out = compose_paths(&g, &[Demand::new(0, 2, 1)], &[vec![0, 1]], &bank).unwrap();
        assert_eq!(out, vec![vec![0, 1]]);
        let err = compose_paths(&g, &[Demand::new(0, 2, 1), Demand::new(0, 1, 1)], &[vec![0, 1], vec![0]], &bank);
        assert_eq!(err, Err(PipelineError::BankExhausted(0)));
    }

    #[test]
    fn trimming_removes_detours() {
        let g = OuterplanarInstance::cycle(4);
        // 0 -> 1 -> 2 -> 1 -> 0 -> 3
        assert_eq!(trim_walk(&g, 0, &[0, 1, 1, 0, 3]), vec![3]);
        // 0 -> 1 -> 2 -> 3 -> 2
        assert_eq!(trim_walk(&g, 0, &[0, 1, 2, 2]), vec![0, 1]);
    }

    #[test]
    fn verify_examples() {
        let g = OuterplanarInstance::cycle(4);
        let ds = [Demand::new(0, 2, 1), Demand::new(1, 3, 1)];
        assert!(verify_solution(&g, &ds, &[0], &[vec![0, 1]]).is_empty());
        assert_eq!(
            verify_solution(&g, &ds, &[0, 1], &[vec![0, 1], vec![1, 2]]),
            vec![Violation::OverCapacity { edge: 1, used: 2, capacity: 1 }]
        );
        assert_eq!(
            verify_solution(&g, &ds, &[1], &[vec![1]]),
            vec![Violation::WrongEndpoint { demand: 1, reached: 2 }]
        );
    }

    #[test]
    fn c4_two_crossing_demands() {
        let g = OuterplanarInstance::cycle(4);
        let h = DemandSet::from_raw(4, &[(0, 2, 5), (1, 3, 1)]).unwrap();
        let sol = solve_edp(&g, &h, Selection::Greedy).unwrap();
        // Tree is the path 1-2-3-0; both tree paths use edge (2,3).
        assert_eq!(sol.selected, vec![0]);
        assert_eq!(sol.stats.profit, 5);
    }

    #[test]
    fn empty_demands() {
        let g = OuterplanarInstance::cycle(5);
        let sol = solve_edp(&g, &DemandSet::empty(), Selection::Exact).unwrap();
        assert_eq!((sol.stats.profit, sol.paths.len()), (0, 0));
    }
}
