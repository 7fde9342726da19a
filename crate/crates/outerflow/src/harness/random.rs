//! Seeded instance and demand generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{check_cut_condition, Demand, DemandSet, NodeId, OuterplanarInstance};
use crate::router::check_joint_outerplanarity;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chords of a random triangulation of the polygon `0..n`.
fn triangulation_chords(rng: &mut ChaCha8Rng, n: usize) -> Vec<(NodeId, NodeId)> {
    let mut chords = Vec::new();
    let mut stack = vec![(0, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let k = rng.gen_range(i + 1..j);
        for (a, b) in [(i, k), (k, j)] {
            if b - a >= 2 {
                chords.push((a, b));
                stack.push((a, b));
            }
        }
    }
    chords
}

/// The cycle `0, 1, ..., n-1` plus a random subset of the chords of a random
/// triangulation (each kept with probability 1/2). Capacities are uniform in
/// `1..=max_cap`. Cycle edges come first: edge `i` joins `i` and `i + 1 mod n`.
pub fn random_outerplanar(seed: u64, n: usize, max_cap: u64) -> OuterplanarInstance {
    random_outerplanar_with_cuts(seed, n, max_cap, 0.0)
}

/// Like [`random_outerplanar`], but each cycle edge is also dropped with
/// probability `drop_boundary` as long as the graph stays connected. The
/// result may have cut vertices and bridges.
pub fn random_outerplanar_with_cuts(
    seed: u64,
    n: usize,
    max_cap: u64,
    drop_boundary: f64,
) -> OuterplanarInstance {
    assert!(n >= 2, "need at least two nodes");
    assert!(max_cap >= 1, "capacities are positive");
    let mut rng = rng(seed);
    let mut pairs: Vec<(NodeId, NodeId)> = if n == 2 {
        vec![(0, 1)]
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    };
    if n >= 4 {
        let chords = triangulation_chords(&mut rng, n);
        pairs.extend(chords.into_iter().filter(|_| rng.gen_bool(0.5)));
    }
    if drop_boundary > 0.0 && n >= 3 {
        for i in 0..n {
            if !rng.gen_bool(drop_boundary) {
                continue;
            }
            let (a, b) = (i, (i + 1) % n);
            let Some(pos) = pairs.iter().position(|&p| p == (a, b)) else {
                continue;
            };
            let removed = pairs.remove(pos);
            if !connected(n, &pairs) {
                pairs.insert(pos, removed);
            }
        }
    }
    let raw: Vec<(NodeId, NodeId, i64)> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, rng.gen_range(1..=max_cap) as i64))
        .collect();
    OuterplanarInstance::new(n, &raw).expect("generated instance is outerplanar")
}

fn connected(n: usize, pairs: &[(NodeId, NodeId)]) -> bool {
    let mut uf = crate::sparsifier::UnionFind::new(n);
    let merged = pairs.iter().filter(|&&(a, b)| uf.union(a, b)).count();
    merged + 1 == n
}

/// Unit demands whose chords fit inside the outer cycle together with the
/// graph's chords and that satisfy the cut condition. Random chords are
/// proposed `8 * count` times and kept while compatible; then random demands
/// are removed until the cut condition holds. May return fewer than `count`.
pub fn random_feasible_demands(seed: u64, instance: &OuterplanarInstance, count: usize) -> DemandSet {
    let n = instance.n();
    let mut rng = rng(seed);
    let mut chosen: Vec<Demand> = Vec::new();
    if n < 2 {
        return DemandSet::empty();
    }
    for _ in 0..8 * count {
        if chosen.len() == count {
            break;
        }
        let s = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        chosen.push(Demand::new(s, t, 1));
        let set = DemandSet::from_vec_unchecked(chosen.clone());
        if check_joint_outerplanarity(instance, &set).is_some() {
            chosen.pop();
        }
    }
    while !check_cut_condition(instance, &DemandSet::from_vec_unchecked(chosen.clone()), false).holds {
        let k = rng.gen_range(0..chosen.len());
        chosen.remove(k);
    }
    DemandSet::from_vec_unchecked(chosen)
}

/// Demands with random endpoints and profits in `1..=max_profit`, no
/// structural constraints.
pub fn random_weighted_demands(seed: u64, n: usize, count: usize, max_profit: u64) -> DemandSet {
    let mut rng = rng(seed);
    let demands = (0..count)
        .map(|_| {
            let mut ends: Vec<NodeId> = (0..n).collect();
            ends.shuffle(&mut rng);
            Demand::new(ends[0], ends[1], rng.gen_range(1..=max_profit))
        })
        .collect();
    DemandSet::from_vec_unchecked(demands)
}

/// A random labelled tree on `n` nodes: node `v > 0` hangs off a uniform
/// earlier node. Returned as edge list with capacities in `1..=max_cap`.
pub fn random_tree(seed: u64, n: usize, max_cap: u64) -> Vec<(NodeId, NodeId, u64)> {
    let mut rng = rng(seed);
    (1..n)
        .map(|v| (rng.gen_range(0..v), v, rng.gen_range(1..=max_cap)))
        .collect()
}
