//! The recursive weight assignment on a rooted metric tree.
//!
//! Rooted at `r`, every point at depth `cut_depth(h(r))` becomes a cut point
//! (edges are subdivided where needed). Cut points are sorted by height; the
//! first keeps a zero-weight path up to `r`, every other one puts
//! `cut_weight(h)` on its first piece towards `r`. The procedure then recurses
//! below each cut point.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dual::DualTree;
use crate::graph::EdgeId;

/// Arithmetic of one numeric mode of the recursion.
pub(crate) trait Length: Clone + Ord + Debug {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    /// Depth of the cut points below a root of height `h`.
    fn cut_depth(h: &Self) -> Self;
    /// Weight placed above a non-first cut point of height `h`.
    fn cut_weight(h: &Self) -> Self;
    fn to_rational(&self) -> BigRational;
    /// Names of the per-root bounds violated by a leaf at distance `d`
    /// (original) and `d_star` (assigned) from a root of height `h`.
    fn root_violations(d: &Self, d_star: &Self, h: &Self) -> Vec<&'static str>;
}

/// Exact rationals: cut at `h/2`, weight `h`.
impl Length for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn cut_depth(h: &Self) -> Self {
        h / BigRational::from_integer(BigInt::from(2))
    }
    fn cut_weight(h: &Self) -> Self {
        h.clone()
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn root_violations(d: &Self, d_star: &Self, h: &Self) -> Vec<&'static str> {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut out = Vec::new();
        // d*(x,r) <= 2 d(x,r) - h(r)
        if d_star > &(&two * d - h) {
            out.push("upper: d* <= 2d - h");
        }
        // d*(x,r) >= d(x,r) - h(r)
        if d_star < &(d - h) {
            out.push("lower: d* >= d - h");
        }
        out
    }
}

/// Integers: cut at `ceil(h/2)`, weight `max(floor(h/2), 1)`. Path lengths
/// are sums of `u64` capacities, so `i128` cannot overflow.
impl Length for i128 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, other: &Self) -> Self {
        self.checked_add(*other).expect("path length overflow")
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn cut_depth(h: &Self) -> Self {
        h.div_ceil(&2)
    }
    fn cut_weight(h: &Self) -> Self {
        (h / 2).max(1)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
    fn root_violations(d: &Self, d_star: &Self, h: &Self) -> Vec<&'static str> {
        let mut out = Vec::new();
        // 2 d*(x,r) <= 2 d(x,r) - h(r) + 2
        if 2 * d_star > 2 * d - h + 2 {
            out.push("upper: 2d* <= 2d - h + 2");
        }
        // d*(x,r) <= d(x,r) when h(r) <= 1
        if *h <= 1 && d_star > d {
            out.push("strong upper: d* <= d when h <= 1");
        }
        // d(x,r) <= 3 d*(x,r) + h(r)
        if *d > 3 * d_star + h {
            out.push("lower: d <= 3d* + h");
        }
        out
    }
}

/// Counters for the per-root bounds, checked for every leaf below every
/// recursion root.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecursionAudit {
    pub roots: usize,
    pub leaf_checks: usize,
    pub violations: Vec<String>,
}

impl RecursionAudit {
    pub fn merge(&mut self, other: RecursionAudit) {
        self.roots += other.roots;
        self.leaf_checks += other.leaf_checks;
        self.violations.extend(other.violations);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A rooted copy of the dual tree whose edges may be split into pieces.
/// Every node except the root owns the piece above it.
pub(crate) struct MetricTree<L: Length> {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// Length of the piece above each node.
    length: Vec<L>,
    /// Dual edge the piece above each node belongs to.
    edge: Vec<EdgeId>,
    /// Assigned weight of the piece above each node.
    weight: Vec<L>,
    leaf: Vec<bool>,
    /// Original dual node at or directly below each node; used for ties.
    anchor: Vec<usize>,
}

impl<L: Length> MetricTree<L> {
    pub(crate) fn new(dual: &DualTree, root: usize, lengths: &[L]) -> Self {
        let size = dual.nodes.len();
        let adj = dual.adjacency();
        let mut tree = MetricTree {
            parent: vec![None; size],
            children: vec![Vec::new(); size],
            length: vec![L::zero(); size],
            edge: vec![usize::MAX; size],
            weight: vec![L::zero(); size],
            leaf: dual.nodes.iter().map(|v| v.leaf).collect(),
            anchor: (0..size).collect(),
        };
        let mut seen = vec![false; size];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.parent[w] = Some(v);
                    tree.children[v].push(w);
                    tree.length[w] = lengths[e].clone();
                    tree.edge[w] = e;
                    stack.push(w);
                }
            }
        }
        tree
    }

    fn subdivide(&mut self, child: usize, above: L) -> usize {
        let p = self.parent[child].expect("subdivided piece has a parent");
        let s = self.parent.len();
        let below = self.length[child].minus(&above);
        self.parent.push(Some(p));
        self.children.push(vec![child]);
        self.length.push(above);
        self.edge.push(self.edge[child]);
        self.weight.push(L::zero());
        self.leaf.push(false);
        self.anchor.push(self.anchor[child]);
        self.length[child] = below;
        self.parent[child] = Some(s);
        let slot = self.children[p]
            .iter()
            .position(|&c| c == child)
            .expect("child listed under parent");
        self.children[p][slot] = s;
        s
    }

    fn preorder(&self, root: usize) -> Vec<usize> {
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// `h(v)` for every node below `root`, indexed by node id.
    fn heights(&self, root: usize) -> Vec<Option<L>> {
        let mut h: Vec<Option<L>> = vec![None; self.parent.len()];
        for &v in self.preorder(root).iter().rev() {
            h[v] = if self.leaf[v] {
                Some(L::zero())
            } else {
                self.children[v]
                    .iter()
                    .map(|&c| h[c].as_ref().expect("child height").plus(&self.length[c]))
                    .min()
            };
        }
        h
    }

    fn is_bare_path(&self, root: usize) -> bool {
        let mut v = root;
        loop {
            match self.children[v].as_slice() {
                [] => return true,
                [c] => v = *c,
                _ => return false,
            }
        }
    }

    /// Runs the recursion from `root` and checks the per-root bounds.
    pub(crate) fn assign(&mut self, root: usize) -> RecursionAudit {
        let mut roots: Vec<(usize, L)> = Vec::new();
        let mut work = vec![root];
        while let Some(r) = work.pop() {
            if self.leaf[r] {
                continue;
            }
            let h = self.heights(r);
            let hr = h[r].clone().expect("root height");
            roots.push((r, hr.clone()));
            if self.is_bare_path(r) {
                continue;
            }
            debug_assert!(hr > L::zero());

            let target = L::cut_depth(&hr);
            let mut cuts: Vec<(L, usize, usize)> = Vec::new();
            let mut stack = vec![(r, L::zero())];
            while let Some((v, depth)) = stack.pop() {
                for c in self.children[v].clone() {
                    let below = depth.plus(&self.length[c]);
                    if below < target {
                        stack.push((c, below));
                        continue;
                    }
                    let hc = h[c].clone().expect("child height");
                    let point = if below == target {
                        (hc, c)
                    } else {
                        let rest = below.minus(&target);
                        let s = self.subdivide(c, target.minus(&depth));
                        (hc.plus(&rest), s)
                    };
                    cuts.push((point.0, self.anchor[point.1], point.1));
                }
            }
            cuts.sort();
            for (i, (hc, _, c)) in cuts.iter().enumerate() {
                if i > 0 {
                    self.weight[*c] = L::cut_weight(hc);
                }
                work.push(*c);
            }
        }

        let mut audit = RecursionAudit::default();
        for (r, hr) in roots {
            audit.roots += 1;
            let mut stack = vec![(r, L::zero(), L::zero())];
            while let Some((v, d, d_star)) = stack.pop() {
                if self.leaf[v] {
                    audit.leaf_checks += 1;
                    for what in L::root_violations(&d, &d_star, &hr) {
                        audit.violations.push(format!(
                            "{what}: root {r}, leaf {v}, d = {d:?}, d* = {d_star:?}, h = {hr:?}"
                        ));
                    }
                }
                for &c in &self.children[v] {
                    stack.push((c, d.plus(&self.length[c]), d_star.plus(&self.weight[c])));
                }
            }
        }
        audit
    }

    /// Sums piece weights per dual edge.
    pub(crate) fn edge_weights(&self, edge_count: usize) -> Vec<L> {
        let mut out = vec![L::zero(); edge_count];
        for v in 0..self.parent.len() {
            if self.parent[v].is_some() {
                out[self.edge[v]] = out[self.edge[v]].plus(&self.weight[v]);
            }
        }
        out
    }

    /// Every node has a zero-weight path to some leaf, i.e. every component
    /// of zero-weight edges holds a leaf.
    pub(crate) fn zero_paths_to_leaves(&self) -> bool {
        let mut ok = vec![false; self.parent.len()];
        let Some(root) = (0..self.parent.len()).find(|&v| self.parent[v].is_none()) else {
            return true;
        };
        let order = self.preorder(root);
        for &v in order.iter().rev() {
            ok[v] = self.leaf[v]
                || self.children[v]
                    .iter()
                    .any(|&c| ok[c] && self.weight[c] == L::zero());
        }
        for &v in &order {
            if let Some(p) = self.parent[v] {
                ok[v] |= ok[p] && self.weight[v] == L::zero();
            }
        }
        ok.iter().all(|&x| x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn half() -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2))
    }

    #[test]
    fn integer_rules() {
        assert_eq!(<i128 as Length>::cut_depth(&1), 1);
        assert_eq!(<i128 as Length>::cut_depth(&5), 3);
        assert_eq!(<i128 as Length>::cut_weight(&0), 1);
        assert_eq!(<i128 as Length>::cut_weight(&1), 1);
        assert_eq!(<i128 as Length>::cut_weight(&7), 3);
    }

    #[test]
    fn real_rules() {
        let three = BigRational::from_integer(BigInt::from(3));
        assert_eq!(BigRational::cut_depth(&three), &three * half());
        assert_eq!(BigRational::cut_weight(&three), three);
    }
}
