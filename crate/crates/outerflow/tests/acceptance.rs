//! The acceptance suite. Every test prints one `PASS`/`FAIL` line straight to
//! stdout (bypassing libtest capture) and then asserts.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use outerflow::dual::{build_dual_tree, cut_to_dual_path};
use outerflow::graph::{
    block_decompose, enumerate_central_cuts, BlockKind, Demand, DemandSet, OuterplanarInstance,
};
use outerflow::harness::{
    oracle_edp, random_feasible_demands, random_tree, random_weighted_demands, trial_instance,
};
use outerflow::lowerbound::{generate_lb_instance, min_congestion_search, DEFAULT_BUDGET};
use outerflow::pipeline::{solve_edp, verify_solution, Selection};
use outerflow::router::{route_all, RouteOptions};
use outerflow::sparsifier::{
    assign_instance_weights, assign_weights_integer, assign_weights_real, check_all_subsets,
    extract_subtree, leaf_pair_report, sparsify, NumericMode, SubtreeSparsifier,
};
use outerflow::tree_flow::{exact_tree_edp, first_fit_partition, is_routable_in_tree, TreeInstance};

const SUITE: std::ops::RangeInclusive<u64> = 1..=500;

fn suite_instance(seed: u64) -> OuterplanarInstance {
    trial_instance(seed, 40, 16)
}

fn line(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {id:>2} {name}: {verdict} ({detail})");
    let _ = out.flush();
}

fn rat(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Checks `û <= u` and `14 û >= u` on every central cut of every block,
/// summing crossing edges directly instead of using the library's tables.
#[test]
fn criterion_01_integer_sparsifier_bound() {
    let start = std::time::Instant::now();
    let (mut cuts, mut bad) = (0u64, Vec::new());
    let mut lo = rat(1, 1);
    for seed in SUITE {
        let g = suite_instance(seed);
        let (_, t) = sparsify(&g, NumericMode::Integer).unwrap();
        for block in block_decompose(&g, &DemandSet::empty()).blocks {
            let m = block.nodes.len();
            let arcs: Vec<(usize, usize)> = match block.kind {
                BlockKind::Bridge => vec![(0, 0)],
                BlockKind::Biconnected => (0..m - 1).flat_map(|i| (i..m - 1).map(move |j| (i, j))).collect(),
            };
            for (i, j) in arcs {
                let inside = |v: usize| v >= i && v <= j;
                let (mut u, mut uh) = (0u64, BigRational::zero());
                for (local, &global) in block.instance.edges().iter().zip(&block.edges) {
                    if inside(local.a) != inside(local.b) {
                        u += local.capacity;
                        uh += &t.capacity[global];
                    }
                }
                cuts += 1;
                let u_r = BigRational::from_integer(BigInt::from(u));
                let fourteen = BigRational::from_integer(BigInt::from(14));
                if uh > u_r || &uh * &fourteen < u_r {
                    bad.push(format!("seed {seed} arc [{}, {}]", block.nodes[i], block.nodes[j]));
                }
                lo = lo.min(&uh / &u_r);
            }
        }
    }
    let pass = bad.is_empty();
    line(
        1,
        "integer sparsifier bound",
        pass,
        &format!(
            "{} instances, {cuts} central cuts, min ratio {lo}, {} violations, {:.1?}",
            SUITE.count(),
            bad.len(),
            start.elapsed()
        ),
    );
    assert!(pass, "{:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn criterion_02_real_leaf_pair_bounds() {
    let (mut pairs, mut bad) = (0usize, Vec::new());
    let (mut lo, mut hi) = (rat(1, 1), rat(1, 1));
    for seed in SUITE {
        let g = suite_instance(seed);
        for block in block_decompose(&g, &DemandSet::empty()).blocks {
            if block.kind != BlockKind::Biconnected {
                continue;
            }
            let dual = build_dual_tree(&block.instance).unwrap();
            let w = assign_weights_real(&dual).unwrap();
            let r = leaf_pair_report(&dual, &w);
            pairs += r.pairs;
            if r.pairs > 0 {
                lo = lo.min(r.min_ratio.clone());
                hi = hi.max(r.max_ratio.clone());
            }
            if r.min_ratio < rat(1, 4) || r.max_ratio > rat(2, 1) {
                bad.push(format!("seed {seed}: {} .. {}", r.min_ratio, r.max_ratio));
            }
        }
    }
    let pass = bad.is_empty();
    line(
        2,
        "real-mode leaf-pair bounds",
        pass,
        &format!("{pairs} leaf pairs, d*/d in [{lo}, {hi}], {} violations", bad.len()),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_03_recursion_bounds() {
    let (mut roots, mut checks, mut bad) = (0usize, 0usize, Vec::new());
    for seed in SUITE {
        let g = suite_instance(seed);
        for block in block_decompose(&g, &DemandSet::empty()).blocks {
            if block.kind != BlockKind::Biconnected {
                continue;
            }
            let dual = build_dual_tree(&block.instance).unwrap();
            for w in [assign_weights_real(&dual).unwrap(), assign_weights_integer(&dual).unwrap()] {
                roots += w.audit.roots;
                checks += w.audit.leaf_checks;
                bad.extend(w.audit.violations.iter().map(|v| format!("seed {seed}: {v}")));
            }
        }
    }
    let pass = bad.is_empty() && roots > 0;
    line(
        3,
        "per-root recursion bounds",
        pass,
        &format!("{roots} recursion roots, {checks} leaf checks, {} violations", bad.len()),
    );
    assert!(pass, "{:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn criterion_04_all_cuts_extension() {
    let (mut subsets, mut bad) = (0u64, Vec::new());
    let mut lo = rat(1, 1);
    for seed in 1..=100 {
        let g = trial_instance(seed, 16, 16);
        let (_, t) = sparsify(&g, NumericMode::Integer).unwrap();
        let r = check_all_subsets(&g, &t).expect("n <= 16");
        subsets += r.subsets;
        lo = lo.min(r.min_ratio.clone());
        if !r.holds() || r.max_ratio > rat(1, 1) || r.min_ratio < rat(1, 14) {
            bad.push(format!("seed {seed}: witness {:?}", r.witness));
        }
    }
    let pass = bad.is_empty();
    line(
        4,
        "all-cuts extension",
        pass,
        &format!("100 instances, {subsets} proper subsets, min ratio {lo}, {} violations", bad.len()),
    );
    assert!(pass, "{bad:?}");
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

/// Independent forest and spanning-tree checks on one assignment.
fn structure_problems(g: &OuterplanarInstance, weights: &[BigRational], t: &SubtreeSparsifier) -> Vec<String> {
    let mut out = Vec::new();
    let mut parent: Vec<usize> = (0..g.n()).collect();
    for (id, w) in weights.iter().enumerate() {
        if w > &BigRational::zero() {
            let e = g.edge(id);
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra == rb {
                out.push(format!("positive edges close a cycle at {id}"));
            }
            parent[ra] = rb;
        }
    }
    let mut parent: Vec<usize> = (0..g.n()).collect();
    for &id in &t.tree_edges {
        let e = g.edge(id);
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra == rb {
            out.push(format!("tree edges close a cycle at {id}"));
        }
        parent[ra] = rb;
    }
    if t.tree_edges.len() + 1 != g.n() {
        out.push(format!("{} tree edges on {} nodes", t.tree_edges.len(), g.n()));
    }
    for &f in &t.fillers {
        if !t.capacity[f].is_zero() {
            out.push(format!("filler {f} has capacity"));
        }
    }
    out
}

#[test]
fn criterion_05_subtree_structure() {
    let (mut runs, mut fillers, mut bad) = (0, 0, Vec::new());
    for seed in SUITE {
        let g = suite_instance(seed);
        for mode in [NumericMode::Integer, NumericMode::Real] {
            let w = assign_instance_weights(&g, mode).unwrap();
            let t = extract_subtree(&g, &w).unwrap();
            runs += 1;
            fillers += t.fillers.len();
            if !w.zero_paths {
                bad.push(format!("seed {seed} {mode:?}: a dual node lacks a zero path to a leaf"));
            }
            bad.extend(
                structure_problems(&g, &w.weights, &t)
                    .into_iter()
                    .map(|p| format!("seed {seed} {mode:?}: {p}")),
            );
        }
    }
    let pass = bad.is_empty();
    line(
        5,
        "subtree structure",
        pass,
        &format!("{runs} runs, {fillers} filler edges, {} failures", bad.len()),
    );
    assert!(pass, "{:?}", &bad[..bad.len().min(5)]);
}

/// Walks every path and counts edge use without library help.
fn paths_ok(g: &OuterplanarInstance, demands: &[Demand], paths: &[Vec<usize>]) -> bool {
    let mut used = vec![0u64; g.edges().len()];
    for (d, p) in demands.iter().zip(paths) {
        let mut at = d.source;
        for &e in p {
            let edge = g.edge(e);
            if edge.a != at && edge.b != at {
                return false;
            }
            at = if edge.a == at { edge.b } else { edge.a };
            used[e] += 1;
        }
        if at != d.target {
            return false;
        }
    }
    used.iter().zip(g.edges()).all(|(&u, e)| u <= e.capacity)
}

#[test]
fn criterion_06_router_completeness() {
    let (mut demands, mut routed, mut bad) = (0usize, 0usize, Vec::new());
    for seed in 1..=200u64 {
        let g = trial_instance(seed, 30, 4);
        let h = random_feasible_demands(seed, &g, g.n());
        demands += h.len();
        match route_all(&g, &h, RouteOptions { debug_invariants: true }) {
            Ok(sol) => {
                let paths: Vec<_> = sol.paths.iter().map(|p| p.edges.clone()).collect();
                let ids: Vec<usize> = (0..h.len()).collect();
                let violations = verify_solution(&g, h.as_slice(), &ids, &paths);
                if violations.is_empty() && paths_ok(&g, h.as_slice(), &paths) {
                    routed += h.len();
                } else {
                    bad.push(format!("seed {seed}: {violations:?}"));
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    let pass = bad.is_empty() && routed == demands && demands > 0;
    line(
        6,
        "router completeness",
        pass,
        &format!("200 instances, {routed}/{demands} demands routed, invariant checked after every step"),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_07_pipeline_ratio() {
    let start = std::time::Instant::now();
    let (mut bad, mut ratios) = (Vec::new(), Vec::new());
    for seed in 1..=100u64 {
        let g = trial_instance(seed, 10, 3);
        let h = random_weighted_demands(seed, g.n(), 6, 10);
        let sol = match solve_edp(&g, &h, Selection::Greedy) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let opt = oracle_edp(&g, &h).unwrap();
        let violations = verify_solution(&g, h.as_slice(), &sol.selected, &sol.edge_paths());
        let chosen: Vec<Demand> = sol.selected.iter().map(|&k| *h.get(k)).collect();
        if !violations.is_empty() || !paths_ok(&g, &chosen, &sol.edge_paths()) {
            bad.push(format!("seed {seed}: {violations:?}"));
        }
        if sol.stats.profit * 224 < opt.profit || sol.stats.profit > opt.profit {
            bad.push(format!("seed {seed}: profit {} vs optimum {}", sol.stats.profit, opt.profit));
        }
        if opt.profit > 0 {
            ratios.push(rat(sol.stats.profit, opt.profit));
        }
    }
    let min = ratios.iter().min().cloned().unwrap_or_else(|| rat(1, 1));
    let mean = ratios.iter().map(|r| r.to_f64().unwrap()).sum::<f64>() / ratios.len().max(1) as f64;
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed.as_secs() < 300;
    line(
        7,
        "pipeline ratio",
        pass,
        &format!("100 instances, min profit/optimum {min} (bound 1/224), mean {mean:.3}, {elapsed:.1?}"),
    );
    assert!(pass, "{bad:?}");
}

/// Exhaustive maximum over all subsets, with tree paths found by BFS.
fn brute_tree_optimum(n: usize, edges: &[(usize, usize, u64)], demands: &[Demand]) -> u64 {
    let mut adj = vec![Vec::new(); n];
    for (id, &(a, b, _)) in edges.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    let path = |s: usize, t: usize| {
        let mut via = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut v = t;
        while let Some((p, e)) = via[v] {
            out.push(e);
            v = p;
        }
        out
    };
    let paths: Vec<Vec<usize>> = demands.iter().map(|d| path(d.source, d.target)).collect();
    let mut best = 0;
    for mask in 0u32..1 << demands.len() {
        let mut load = vec![0u64; edges.len()];
        let mut profit = 0;
        for (k, p) in paths.iter().enumerate() {
            if mask >> k & 1 == 1 {
                profit += demands[k].profit;
                for &e in p {
                    load[e] += 1;
                }
            }
        }
        if load.iter().zip(edges).all(|(&l, e)| l <= e.2) {
            best = best.max(profit);
        }
    }
    best
}

#[test]
fn criterion_08_tree_layer() {
    let (mut bad, mut over, mut classes_total) = (Vec::new(), 0, 0);
    for seed in 1..=100u64 {
        let n = 2 + (seed as usize % 11);
        let edges = random_tree(seed, n, 3);
        let tree = TreeInstance::new(n, &edges).unwrap();
        let count = 1 + (seed as usize % 12);
        let h = random_weighted_demands(seed, n, count, 9);
        let ds = h.as_slice();
        let exact = exact_tree_edp(&tree, ds).unwrap();
        let brute = brute_tree_optimum(n, &edges, ds);
        if exact.profit != brute {
            bad.push(format!("seed {seed}: exact {} vs brute force {brute}", exact.profit));
        }
        let p = first_fit_partition(&tree, ds, None).unwrap();
        let mut seen = vec![0; ds.len()];
        for class in &p.classes {
            let members: Vec<Demand> = class.iter().map(|&k| ds[k]).collect();
            if !is_routable_in_tree(&tree, &members).unwrap() {
                bad.push(format!("seed {seed}: class {class:?} not routable"));
            }
            for &k in class {
                seen[k] += 1;
            }
        }
        if seen.iter().any(|&c| c != 1) {
            bad.push(format!("seed {seed}: classes do not partition the demands"));
        }
        classes_total += p.classes.len();
        if p.classes.len() as u64 > p.reference_bound {
            over += 1;
        }
    }
    let pass = bad.is_empty();
    line(
        8,
        "tree layer",
        pass,
        &format!(
            "100 trees, exact solver matches brute force, {classes_total} classes, {over} partitions above ceil(4k) (recorded only)"
        ),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_09_lower_bound_family() {
    let mut bad = Vec::new();
    for n in 0..=5u32 {
        let g = generate_lb_instance(n).unwrap();
        let nodes = 3 * (1usize << n);
        // Three seed chords, each the root of a full binary recursion of depth n.
        let edges = 3 * ((1usize << (n + 1)) - 1);
        if g.n() != nodes || g.edges().len() != edges {
            bad.push(format!("level {n}: {} nodes, {} edges", g.n(), g.edges().len()));
        }
    }
    let values: Vec<_> = (0..=2u32)
        .map(|n| min_congestion_search(&generate_lb_instance(n).unwrap(), DEFAULT_BUDGET, 7))
        .collect();
    let sampled = min_congestion_search(&generate_lb_instance(2).unwrap(), 2_000, 7);
    let v: Vec<BigRational> = values.iter().map(|r| r.congestion.value.clone()).collect();
    if !(values[0].exhaustive && values[1].exhaustive) {
        bad.push("levels 0 and 1 were not searched exhaustively".into());
    }
    if v[1] <= v[0] {
        bad.push(format!("value(1) = {} not above value(0) = {}", v[1], v[0]));
    }
    if v[2] < v[1] || sampled.congestion.value < v[1] {
        bad.push(format!("value(2) = {} below value(1) = {}", v[2], v[1]));
    }
    let pass = bad.is_empty();
    line(
        9,
        "lower-bound family",
        pass,
        &format!(
            "counts ok for levels 0..=5, min congestion {} / {} / {} (level 2 exhaustive: {}, sampled: {})",
            v[0], v[1], v[2], values[2].exhaustive, sampled.congestion.value
        ),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_10_dual_correspondence() {
    let (mut cuts, mut bad) = (0u64, Vec::new());
    for seed in SUITE {
        let g = suite_instance(seed);
        for block in block_decompose(&g, &DemandSet::empty()).blocks {
            if block.kind != BlockKind::Biconnected {
                continue;
            }
            let dual = build_dual_tree(&block.instance).unwrap();
            for cut in enumerate_central_cuts(&block.instance).unwrap() {
                cuts += 1;
                let path = cut_to_dual_path(&dual, &cut).unwrap();
                let direct: u64 = block
                    .instance
                    .edges()
                    .iter()
                    .filter(|e| (cut.start..=cut.end).contains(&e.a) != (cut.start..=cut.end).contains(&e.b))
                    .map(|e| e.capacity)
                    .sum();
                if dual.path_weight(&path) != direct || cut.capacity != direct {
                    bad.push(format!("seed {seed}: arc [{}, {}]", cut.start, cut.end));
                }
            }
        }
    }
    let pass = bad.is_empty();
    line(
        10,
        "dual correspondence",
        pass,
        &format!("{cuts} central cuts, dual path weight equals cut capacity on all but {}", bad.len()),
    );
    assert!(pass, "{:?}", &bad[..bad.len().min(5)]);
}
