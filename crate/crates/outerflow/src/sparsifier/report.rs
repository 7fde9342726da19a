//! Checks of a sparsifier against the graph: central cuts, dual leaf pairs
//! and, for small graphs, every proper subset.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{NumericMode, SubtreeSparsifier, WeightAssignment};
use crate::dual::DualTree;
use crate::graph::{arc_table, block_decompose, BlockKind, DemandSet, NodeId, OuterplanarInstance};
use crate::rational::serde_text;

/// `û(δ_T(X)) / u(δ_G(X))` for one central cut. The shore is the arc from
/// `start` to `end` (global ids) of the block's outer cycle, extended by
/// everything hanging off it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CutRatio {
    pub block: usize,
    pub start: NodeId,
    pub end: NodeId,
    pub capacity: u64,
    #[serde(with = "serde_text")]
    pub tree_capacity: BigRational,
    #[serde(with = "serde_text")]
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CutReport {
    pub mode: NumericMode,
    #[serde(with = "serde_text")]
    pub alpha: BigRational,
    #[serde(with = "serde_text")]
    pub beta: BigRational,
    pub cuts: Vec<CutRatio>,
    #[serde(with = "serde_text")]
    pub min_ratio: BigRational,
    #[serde(with = "serde_text")]
    pub max_ratio: BigRational,
    /// Cuts whose ratio lies outside `[alpha, beta]`.
    pub violations: Vec<CutRatio>,
}

impl CutReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Ratios over every central cut of every block, checked against the bounds
/// of the sparsifier's mode.
pub fn cut_ratio_report(instance: &OuterplanarInstance, sparsifier: &SubtreeSparsifier) -> CutReport {
    let (alpha, beta) = sparsifier.mode.bounds();
    let mut cuts = Vec::new();
    for (b, block) in block_decompose(instance, &DemandSet::empty()).blocks.iter().enumerate() {
        let m = block.nodes.len();
        let u = arc_table(m, block.instance.edges().iter().map(|e| (e.a, e.b, e.capacity as i64)));
        let t = arc_table(
            m,
            block.instance.edges().iter().zip(&block.edges).map(|(e, &g)| {
                (e.a, e.b, sparsifier.capacity[g].clone())
            }),
        );
        let arcs: Vec<(usize, usize)> = match block.kind {
            BlockKind::Bridge => vec![(0, 0)],
            BlockKind::Biconnected => (0..m - 1).flat_map(|i| (i..m - 1).map(move |j| (i, j))).collect(),
        };
        for (i, j) in arcs {
            let capacity = u.get(i, j) as u64;
            let tree_capacity = t.get(i, j);
            let ratio = &tree_capacity / rat(capacity);
            cuts.push(CutRatio {
                block: b,
                start: block.nodes[i],
                end: block.nodes[j],
                capacity,
                tree_capacity,
                ratio,
            });
        }
    }
    let min_ratio = cuts.iter().map(|c| c.ratio.clone()).min().unwrap_or_else(BigRational::one);
    let max_ratio = cuts.iter().map(|c| c.ratio.clone()).max().unwrap_or_else(BigRational::one);
    let violations = cuts
        .iter()
        .filter(|c| c.ratio < alpha || c.ratio > beta)
        .cloned()
        .collect();
    CutReport {
        mode: sparsifier.mode,
        alpha,
        beta,
        cuts,
        min_ratio,
        max_ratio,
        violations,
    }
}

/// `d*(x, y) / d(x, y)` over all pairs of dual leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LeafPairReport {
    pub pairs: usize,
    #[serde(with = "serde_text")]
    pub min_ratio: BigRational,
    #[serde(with = "serde_text")]
    pub max_ratio: BigRational,
    pub violations: Vec<String>,
}

/// Leaf-pair distances of the dual tree under its own weights (`d`) and
/// under the assignment (`d*`). Real mode must give `d/4 <= d* <= 2d`,
/// integer mode `d/14 <= d* <= d`.
pub fn leaf_pair_report(dual: &DualTree, w: &WeightAssignment) -> LeafPairReport {
    let (lo, hi) = match w.mode {
        NumericMode::Real => (
            BigRational::new(BigInt::one(), BigInt::from(4)),
            rat(2),
        ),
        NumericMode::Integer => w.mode.bounds(),
    };
    let adj = dual.adjacency();
    let leaves: Vec<usize> = (0..dual.nodes.len()).filter(|&v| dual.is_leaf(v)).collect();
    let mut report = LeafPairReport {
        pairs: 0,
        min_ratio: BigRational::one(),
        max_ratio: BigRational::one(),
        violations: Vec::new(),
    };
    let mut first = true;
    for (k, &x) in leaves.iter().enumerate() {
        let mut dist: Vec<Option<(u64, BigRational)>> = vec![None; dual.nodes.len()];
        dist[x] = Some((0, BigRational::zero()));
        let mut stack = vec![x];
        while let Some(v) = stack.pop() {
            let (d, ds) = dist[v].clone().expect("visited");
            for &(y, e) in &adj[v] {
                if dist[y].is_none() {
                    dist[y] = Some((d + dual.edges[e].weight, &ds + &w.weights[e]));
                    stack.push(y);
                }
            }
        }
        for &y in &leaves[k + 1..] {
            let (d, ds) = dist[y].clone().expect("tree is connected");
            let ratio = ds / rat(d);
            report.pairs += 1;
            if first || ratio < report.min_ratio {
                report.min_ratio = ratio.clone();
            }
            if first || ratio > report.max_ratio {
                report.max_ratio = ratio.clone();
            }
            first = false;
            if ratio < lo || ratio > hi {
                report.violations.push(format!(
                    "leaves {x} and {y}: d* / d = {}",
                    crate::rational::to_string(&ratio)
                ));
            }
        }
    }
    report
}

/// The sparsifier bounds over every proper subset of nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AllSubsetsReport {
    pub subsets: u64,
    #[serde(with = "serde_text")]
    pub min_ratio: BigRational,
    #[serde(with = "serde_text")]
    pub max_ratio: BigRational,
    pub violations: u64,
    /// A violating shore, if any.
    pub witness: Option<Vec<NodeId>>,
}

impl AllSubsetsReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks every shore not containing node `n - 1`; `None` when `n` exceeds
/// the exhaustive limit.
pub fn check_all_subsets(
    instance: &OuterplanarInstance,
    sparsifier: &SubtreeSparsifier,
) -> Option<AllSubsetsReport> {
    let n = instance.n();
    if n > crate::graph::EXHAUSTIVE_NODE_LIMIT {
        return None;
    }
    let (alpha, beta) = sparsifier.mode.bounds();
    // Scale û to integers so the inner loop stays in machine arithmetic.
    let scale = sparsifier
        .capacity
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<i128> = sparsifier
        .capacity
        .iter()
        .map(|c| (c * BigRational::from_integer(scale.clone())).to_integer().to_i128())
        .collect::<Option<_>>()?;
    let s = scale.to_i128()?;
    let frac = |q: &BigRational| (q.numer().to_i128().unwrap(), q.denom().to_i128().unwrap());
    let ((an, ad), (bn, bd)) = (frac(&alpha), frac(&beta));
    let bits: Vec<(u32, i128, i128)> = instance
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| ((1u32 << e.a) | (1u32 << e.b), e.capacity as i128, scaled[id]))
        .collect();
    let mut report = AllSubsetsReport {
        subsets: 0,
        min_ratio: BigRational::one(),
        max_ratio: BigRational::one(),
        violations: 0,
        witness: None,
    };
    // Best ratios as (tree, graph) pairs with tree already scaled.
    let mut lo: Option<(i128, i128)> = None;
    let mut hi: Option<(i128, i128)> = None;
    for mask in 1u32..(1u32 << (n - 1)) {
        let (mut u, mut t) = (0i128, 0i128);
        for &(eb, c, tc) in &bits {
            if (mask & eb).count_ones() == 1 {
                u += c;
                t += tc;
            }
        }
        report.subsets += 1;
        // alpha <= t / (s u) <= beta
        if an * s * u > ad * t || t * bd > bn * s * u {
            report.violations += 1;
            report
                .witness
                .get_or_insert_with(|| (0..n).filter(|v| mask >> v & 1 == 1).collect());
        }
        if lo.is_none_or(|(lt, lu)| t * lu < lt * u) {
            lo = Some((t, u));
        }
        if hi.is_none_or(|(ht, hu)| t * hu > ht * u) {
            hi = Some((t, u));
        }
    }
    let to_ratio = |(t, u): (i128, i128)| {
        BigRational::new(BigInt::from(t), BigInt::from(u) * BigInt::from(s))
    };
    if let (Some(l), Some(h)) = (lo, hi) {
        report.min_ratio = to_ratio(l);
        report.max_ratio = to_ratio(h);
    }
    Some(report)
}
