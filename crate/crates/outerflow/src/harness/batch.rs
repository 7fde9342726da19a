//! Many seeded trials in parallel, folded into one report.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::oracle::oracle_edp;
use super::random::{random_feasible_demands, random_outerplanar_with_cuts, random_weighted_demands};
use crate::dual::build_dual_tree;
use crate::graph::{block_decompose, BlockKind, DemandSet, OuterplanarInstance};
use crate::pipeline::{solve_edp, verify_solution, Selection};
use crate::rational::to_string;
use crate::router::{route_all, RouteOptions};
use crate::sparsifier::{
    assign_weights_real, cut_ratio_report, leaf_pair_report, sparsify, NumericMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sparsifier,
    Router,
    Pipeline,
}

/// Instance of trial `seed`: `n` in `3..=max_n`, capacities up to `max_cap`;
/// every other seed also drops boundary edges to create cut vertices.
pub fn trial_instance(seed: u64, max_n: usize, max_cap: u64) -> OuterplanarInstance {
    let n = 3 + (seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 32) as usize % (max_n - 2);
    let drop = if seed.is_multiple_of(2) { 0.0 } else { 0.2 };
    random_outerplanar_with_cuts(seed, n, max_cap, drop)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchReport {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    /// One line per failed check.
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsifier: Option<SparsifierSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub router: Option<RouterSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SparsifierSummary {
    pub cuts_checked: u64,
    pub min_cut_ratio: String,
    pub max_cut_ratio: String,
    pub cut_violations: u64,
    pub recursion_roots: u64,
    pub bound_violations: u64,
    pub min_leaf_ratio_real: String,
    pub max_leaf_ratio_real: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RouterSummary {
    pub demands: u64,
    pub routed: u64,
    pub feasibility_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineSummary {
    pub instances: u64,
    pub profit: u64,
    pub oracle_profit: u64,
    pub min_ratio: String,
    pub mean_ratio: f64,
}

fn min_max(values: impl Iterator<Item = BigRational>) -> Option<(BigRational, BigRational)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v.clone(), v)),
        Some((lo, hi)) => Some((lo.min(v.clone()), hi.max(v))),
    })
}

fn text(range: &Option<(BigRational, BigRational)>, hi: bool) -> String {
    range
        .as_ref()
        .map(|(l, h)| to_string(if hi { h } else { l }))
        .unwrap_or_else(|| "-".into())
}

pub fn run_batch(suite: Suite, trials: u64, seed: u64) -> BatchReport {
    let seeds: Vec<u64> = (0..trials).map(|t| seed.wrapping_add(t)).collect();
    let mut report = BatchReport {
        suite,
        trials,
        seed,
        failures: Vec::new(),
        sparsifier: None,
        router: None,
        pipeline: None,
    };
    match suite {
        Suite::Sparsifier => {
            struct Trial {
                cuts: u64,
                range: Option<(BigRational, BigRational)>,
                violations: u64,
                roots: u64,
                bounds: u64,
                leaf: Option<(BigRational, BigRational)>,
                failures: Vec<String>,
            }
            let results: Vec<Trial> = seeds
                .par_iter()
                .map(|&s| {
                    let g = trial_instance(s, 40, 16);
                    let mut failures = Vec::new();
                    let (w, t) = match sparsify(&g, NumericMode::Integer) {
                        Ok(x) => x,
                        Err(e) => {
                            return Trial {
                                cuts: 0,
                                range: None,
                                violations: 0,
                                roots: 0,
                                bounds: 0,
                                leaf: None,
                                failures: vec![format!("seed {s}: {e}")],
                            }
                        }
                    };
                    let r = cut_ratio_report(&g, &t);
                    let mut bounds = w.audit.violations.len() as u64;
                    let mut roots = w.audit.roots as u64;
                    let mut leaf = Vec::new();
                    for block in block_decompose(&g, &DemandSet::empty()).blocks {
                        if block.kind == BlockKind::Biconnected {
                            let dual = build_dual_tree(&block.instance).expect("blocks are valid");
                            let real = assign_weights_real(&dual).expect("dual root is internal");
                            bounds += real.audit.violations.len() as u64;
                            roots += real.audit.roots as u64;
                            let lp = leaf_pair_report(&dual, &real);
                            if lp.pairs > 0 {
                                leaf.push(lp.min_ratio.clone());
                                leaf.push(lp.max_ratio.clone());
                            }
                            if !lp.violations.is_empty() {
                                failures.push(format!("seed {s}: {}", lp.violations[0]));
                            }
                        }
                    }
                    if !r.holds() {
                        failures.push(format!("seed {s}: {} central cut violations", r.violations.len()));
                    }
                    if bounds > 0 {
                        failures.push(format!("seed {s}: {bounds} recursion bound violations"));
                    }
                    Trial {
                        cuts: r.cuts.len() as u64,
                        range: min_max(r.cuts.iter().map(|c| c.ratio.clone())),
                        violations: r.violations.len() as u64,
                        roots,
                        bounds,
                        leaf: min_max(leaf.into_iter()),
                        failures,
                    }
                })
                .collect();
            let range = min_max(results.iter().filter_map(|t| t.range.clone()).flat_map(|(a, b)| [a, b]));
            let leaf = min_max(results.iter().filter_map(|t| t.leaf.clone()).flat_map(|(a, b)| [a, b]));
            report.sparsifier = Some(SparsifierSummary {
                cuts_checked: results.iter().map(|t| t.cuts).sum(),
                min_cut_ratio: text(&range, false),
                max_cut_ratio: text(&range, true),
                cut_violations: results.iter().map(|t| t.violations).sum(),
                recursion_roots: results.iter().map(|t| t.roots).sum(),
                bound_violations: results.iter().map(|t| t.bounds).sum(),
                min_leaf_ratio_real: text(&leaf, false),
                max_leaf_ratio_real: text(&leaf, true),
            });
            report.failures = results.into_iter().flat_map(|t| t.failures).collect();
        }
        Suite::Router => {
            let results: Vec<(u64, u64, Option<String>)> = seeds
                .par_iter()
                .map(|&s| {
                    let g = trial_instance(s, 30, 4);
                    let h = random_feasible_demands(s ^ 0x5eed, &g, g.n());
                    let total = h.len() as u64;
                    match route_all(&g, &h, RouteOptions { debug_invariants: true }) {
                        Ok(sol) => {
                            let paths: Vec<_> = sol.paths.iter().map(|p| p.edges.clone()).collect();
                            let ids: Vec<usize> = (0..h.len()).collect();
                            let bad = verify_solution(&g, h.as_slice(), &ids, &paths);
                            let note = bad.first().map(|v| format!("seed {s}: {v:?}"));
                            (total, total, note)
                        }
                        Err(e) => (total, 0, Some(format!("seed {s}: {e}"))),
                    }
                })
                .collect();
            let demands: u64 = results.iter().map(|r| r.0).sum();
            let routed: u64 = results.iter().map(|r| r.1).sum();
            report.router = Some(RouterSummary {
                demands,
                routed,
                feasibility_rate: if demands == 0 { 1.0 } else { routed as f64 / demands as f64 },
            });
            report.failures = results.into_iter().filter_map(|r| r.2).collect();
        }
        Suite::Pipeline => {
            let results: Vec<Result<(u64, u64), String>> = seeds
                .par_iter()
                .map(|&s| {
                    let g = trial_instance(s, 10, 3);
                    let h = random_weighted_demands(s ^ 0xd3a4, g.n(), 6, 10);
                    let sol = solve_edp(&g, &h, Selection::Greedy).map_err(|e| format!("seed {s}: {e}"))?;
                    let opt = oracle_edp(&g, &h).map_err(|e| format!("seed {s}: {e}"))?;
                    if sol.stats.profit * 224 < opt.profit {
                        return Err(format!("seed {s}: profit {} below optimum {} / 224", sol.stats.profit, opt.profit));
                    }
                    Ok((sol.stats.profit, opt.profit))
                })
                .collect();
            let ok: Vec<(u64, u64)> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            let ratios: Vec<BigRational> = ok
                .iter()
                .filter(|(_, o)| *o > 0)
                .map(|&(p, o)| BigRational::new(p.into(), o.into()))
                .collect();
            let range = min_max(ratios.iter().cloned());
            let mean = if ratios.is_empty() {
                1.0
            } else {
                ratios.iter().map(|r| r.to_f64().unwrap_or(0.0)).sum::<f64>() / ratios.len() as f64
            };
            report.pipeline = Some(PipelineSummary {
                instances: ok.len() as u64,
                profit: ok.iter().map(|r| r.0).sum(),
                oracle_profit: ok.iter().map(|r| r.1).sum(),
                min_ratio: text(&range, false),
                mean_ratio: mean,
            });
            report.failures = results.into_iter().filter_map(Result::err).collect();
        }
    }
    report
}
