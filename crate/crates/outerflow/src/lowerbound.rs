//! An outerplanar family on which every spanning tree with inherited
//! capacities has a badly congested fundamental cut, and tools to measure
//! that congestion.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::LowerBoundError;
use crate::graph::{EdgeId, NodeId, OuterplanarInstance};
use crate::rational::serde_text;
use crate::sparsifier::{is_spanning_tree, UnionFind};

/// Largest supported level.
pub const MAX_LEVEL: u32 = 12;

/// Default cap on the number of spanning trees enumerated exhaustively.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Level `n`: `3 * 2^n` nodes on a circle, the three chords
/// `(0, 2^n)`, `(2^n, 2^(n+1))`, `(2^(n+1), 0)`, and recursively for every
/// chord `(u, v)` with `v - u >= 2` the two chords to its midpoint. Chords
/// between circle neighbours are the outer cycle. Unit capacities; edges
/// are listed in breadth-first order of the recursion.
pub fn generate_lb_instance(n: u32) -> Result<OuterplanarInstance, LowerBoundError> {
    if n > MAX_LEVEL {
        return Err(LowerBoundError::TooLarge(n));
    }
    let step = 1usize << n;
    let total = 3 * step;
    let mut queue: std::collections::VecDeque<(usize, usize)> =
        [(0, step), (step, 2 * step), (2 * step, total)].into_iter().collect();
    let mut pairs = Vec::with_capacity(3 * (2 * step - 1));
    while let Some((u, v)) = queue.pop_front() {
        pairs.push((u, v % total));
        if v - u >= 2 {
            let mid = (u + v) / 2;
            queue.push_back((u, mid));
            queue.push_back((mid, v));
        }
    }
    Ok(OuterplanarInstance::unit(total, &pairs).expect("nested chords are outerplanar"))
}

/// Worst fundamental cut of a spanning tree whose edges keep their own
/// capacities: `max_e u(δ_G(X_e)) / u(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Congestion {
    #[serde(with = "serde_text")]
    pub value: BigRational,
    /// Tree edge attaining the maximum (smallest id on ties).
    pub edge: EdgeId,
    /// Shore of that cut (the side without node `edge.b`).
    pub shore: Vec<NodeId>,
}

pub fn fundamental_cut_congestion(
    instance: &OuterplanarInstance,
    tree: &[EdgeId],
) -> Result<Congestion, LowerBoundError> {
    if !is_spanning_tree(instance, tree) {
        return Err(LowerBoundError::NotSpanningTree);
    }
    let (num, den, edge) = congestion_fraction(instance, tree);
    let shore = fundamental_shore(instance, tree, edge);
    Ok(Congestion {
        value: BigRational::new(BigInt::from(num), BigInt::from(den)),
        edge,
        shore: (0..instance.n()).filter(|&v| shore[v]).collect(),
    })
}

/// Side of `edge.a` after removing `edge` from the tree.
fn fundamental_shore(instance: &OuterplanarInstance, tree: &[EdgeId], edge: EdgeId) -> Vec<bool> {
    let n = instance.n();
    let mut adj = vec![Vec::new(); n];
    for &e in tree {
        if e != edge {
            let x = instance.edge(e);
            adj[x.a].push(x.b);
            adj[x.b].push(x.a);
        }
    }
    let mut side = vec![false; n];
    let start = instance.edge(edge).a;
    side[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !side[w] {
                side[w] = true;
                stack.push(w);
            }
        }
    }
    side
}

/// `(numerator, denominator, edge)` of the worst fundamental cut.
fn congestion_fraction(instance: &OuterplanarInstance, tree: &[EdgeId]) -> (u64, u64, EdgeId) {
    let mut best: Option<(u64, u64, EdgeId)> = None;
    let mut sorted = tree.to_vec();
    sorted.sort_unstable();
    for &e in &sorted {
        let side = fundamental_shore(instance, tree, e);
        let cut: u64 = instance
            .edges()
            .iter()
            .filter(|x| side[x.a] != side[x.b])
            .map(|x| x.capacity)
            .sum();
        let den = instance.edge(e).capacity;
        let better = match best {
            None => true,
            Some((bn, bd, _)) => (cut as u128) * (bd as u128) > (bn as u128) * (den as u128),
        };
        if better {
            best = Some((cut, den, e));
        }
    }
    best.expect("spanning tree has an edge")
}

/// Number of spanning trees (with parallel edges counted separately), by
/// the matrix-tree theorem with exact fraction-free elimination.
pub fn count_spanning_trees(instance: &OuterplanarInstance) -> BigInt {
    let n = instance.n();
    if n == 1 {
        return BigInt::from(1);
    }
    let size = n - 1;
    let mut m = vec![vec![BigInt::from(0); size]; size];
    for e in instance.edges() {
        for (x, y) in [(e.a, e.b), (e.b, e.a)] {
            if x < size {
                m[x][x] += 1;
                if y < size {
                    m[x][y] -= 1;
                }
            }
        }
    }
    // Bareiss elimination.
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for k in 0..size {
        if m[k][k] == BigInt::from(0) {
            let Some(r) = (k + 1..size).find(|&r| m[r][k] != BigInt::from(0)) else {
                return BigInt::from(0);
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    prev * sign
}

/// Outcome of [`min_congestion_search`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchReport {
    pub tree: Vec<EdgeId>,
    pub congestion: Congestion,
    /// True when every spanning tree was examined, so the value is the minimum.
    pub exhaustive: bool,
    pub trees_examined: u64,
    pub spanning_trees: String,
}

/// Minimum fundamental-cut congestion over spanning trees. Enumerates all
/// trees when there are at most `budget`; otherwise samples random trees
/// (seeded) and improves each by edge swaps, which only gives an upper
/// bound on the minimum.
pub fn min_congestion_search(instance: &OuterplanarInstance, budget: u64, seed: u64) -> SearchReport {
    let count = count_spanning_trees(instance);
    let (tree, examined, exhaustive) = if count <= BigInt::from(budget) {
        let (t, k) = enumerate_best(instance);
        (t, k, true)
    } else {
        let (t, k) = sample_best(instance, budget, seed);
        (t, k, false)
    };
    let congestion = fundamental_cut_congestion(instance, &tree).expect("search returns spanning trees");
    SearchReport {
        tree,
        congestion,
        exhaustive,
        trees_examined: examined,
        spanning_trees: count.to_string(),
    }
}

fn less(a: (u64, u64), b: (u64, u64)) -> bool {
    (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128)
}

/// Backtracking over edges in id order: include an edge if it joins two
/// components, exclude it if the remaining edges still connect everything.
fn enumerate_best(instance: &OuterplanarInstance) -> (Vec<EdgeId>, u64) {
    struct State<'a> {
        instance: &'a OuterplanarInstance,
        chosen: Vec<EdgeId>,
        best: Option<((u64, u64), Vec<EdgeId>)>,
        examined: u64,
    }

    fn connected_with(instance: &OuterplanarInstance, chosen: &[EdgeId], from: usize) -> bool {
        let mut uf = UnionFind::new(instance.n());
        let mut joined = 0;
        for &e in chosen.iter().chain(&(from..instance.edges().len()).collect::<Vec<_>>()) {
            let x = instance.edge(e);
            if uf.union(x.a, x.b) {
                joined += 1;
            }
        }
        joined + 1 == instance.n()
    }

    fn creates_cycle(instance: &OuterplanarInstance, chosen: &[EdgeId], e: EdgeId) -> bool {
        let mut uf = UnionFind::new(instance.n());
        for &c in chosen {
            let x = instance.edge(c);
            uf.union(x.a, x.b);
        }
        let x = instance.edge(e);
        uf.find(x.a) == uf.find(x.b)
    }

    fn go(s: &mut State, i: usize) {
        let n = s.instance.n();
        if s.chosen.len() + 1 == n {
            s.examined += 1;
            let (num, den, _) = congestion_fraction(s.instance, &s.chosen);
            if s.best.as_ref().is_none_or(|(b, _)| less((num, den), *b)) {
                s.best = Some(((num, den), s.chosen.clone()));
            }
            return;
        }
        if i == s.instance.edges().len() {
            return;
        }
        if !creates_cycle(s.instance, &s.chosen, i) {
            s.chosen.push(i);
            go(s, i + 1);
            s.chosen.pop();
        }
        if connected_with(s.instance, &s.chosen, i + 1) {
            go(s, i + 1);
        }
    }

    let mut s = State {
        instance,
        chosen: Vec::new(),
        best: None,
        examined: 0,
    };
    go(&mut s, 0);
    let (_, tree) = s.best.expect("connected instances have spanning trees");
    (tree, s.examined)
}

/// Random Kruskal trees improved by single edge swaps until no swap lowers
/// the congestion. Every evaluated tree counts against the budget.
fn sample_best(instance: &OuterplanarInstance, budget: u64, seed: u64) -> (Vec<EdgeId>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = instance.edges().len();
    let mut examined = 0u64;
    let mut best: Option<((u64, u64), Vec<EdgeId>)> = None;
    while examined < budget.max(1) {
        let mut order: Vec<EdgeId> = (0..m).collect();
        order.shuffle(&mut rng);
        let mut uf = UnionFind::new(instance.n());
        let mut tree: Vec<EdgeId> = order
            .into_iter()
            .filter(|&e| uf.union(instance.edge(e).a, instance.edge(e).b))
            .collect();
        let (num, den, _) = congestion_fraction(instance, &tree);
        examined += 1;
        let mut value = (num, den);
        'improve: loop {
            for f in 0..m {
                if tree.contains(&f) {
                    continue;
                }
                for pos in 0..tree.len() {
                    if examined >= budget {
                        break 'improve;
                    }
                    let mut cand = tree.clone();
                    cand[pos] = f;
                    if !is_spanning_tree(instance, &cand) {
                        continue;
                    }
                    examined += 1;
                    let (cn, cd, _) = congestion_fraction(instance, &cand);
                    if less((cn, cd), value) {
                        tree = cand;
                        value = (cn, cd);
                        continue 'improve;
                    }
                }
            }
            break;
        }
        if best.as_ref().is_none_or(|(b, _)| less(value, *b)) {
            tree.sort_unstable();
            best = Some((value, tree));
        }
    }
    let (_, tree) = best.expect("at least one sample");
    (tree, examined)
}
