use num_bigint::BigInt;
use num_rational::BigRational;
use outerflow::graph::OuterplanarInstance;
use outerflow::lowerbound::{count_spanning_trees, fundamental_cut_congestion, generate_lb_instance};
use outerflow::sparsifier::{cut_ratio_report, sparsify, NumericMode, SubtreeSparsifier};

fn boundary_path(g: &OuterplanarInstance) -> Vec<usize> {
    (0..g.edges().len())
        .filter(|&id| {
            let e = g.edge(id);
            e.b == e.a + 1
        })
        .collect()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

// The boundary path with inherited capacities loses a factor that grows
// with the level, and drops below 1/14 at level 7.
#[test]
fn boundary_path_is_flagged_at_level_seven() {
    let g = generate_lb_instance(7).unwrap();
    let path = boundary_path(&g);
    let t = SubtreeSparsifier::exact_weights(&g, &path).unwrap();
    let r = cut_ratio_report(&g, &t);
    assert_eq!(r.min_ratio, rat(1, 16));
    assert!(!r.holds());
}

#[test]
fn boundary_path_ratio_shrinks_with_level() {
    for n in 0..=6u32 {
        let g = generate_lb_instance(n).unwrap();
        let t = SubtreeSparsifier::exact_weights(&g, &boundary_path(&g)).unwrap();
        assert_eq!(cut_ratio_report(&g, &t).min_ratio, rat(1, 2 * n as i64 + 2), "level {n}");
    }
}

#[test]
fn sparsifier_survives_where_the_path_fails() {
    let g = generate_lb_instance(7).unwrap();
    let (_, t) = sparsify(&g, NumericMode::Integer).unwrap();
    let r = cut_ratio_report(&g, &t);
    assert!(r.holds());
    assert!(r.min_ratio >= rat(1, 14));
}

#[test]
fn spanning_tree_counts() {
    // Level 0 is a triangle. The larger counts match exhaustive enumeration.
    assert_eq!(count_spanning_trees(&generate_lb_instance(0).unwrap()), BigInt::from(3));
    assert_eq!(count_spanning_trees(&generate_lb_instance(1).unwrap()), BigInt::from(54));
    assert_eq!(count_spanning_trees(&generate_lb_instance(2).unwrap()), BigInt::from(15876));
}

#[test]
fn path_congestion_grows() {
    let mut last = BigRational::from_integer(BigInt::from(0));
    for n in 0..=4u32 {
        let g = generate_lb_instance(n).unwrap();
        let c = fundamental_cut_congestion(&g, &boundary_path(&g)).unwrap();
        assert!(c.value > last, "level {n}");
        last = c.value;
    }
}
