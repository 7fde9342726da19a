use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use outerflow::dual::build_dual_tree;
use outerflow::error::{GraphError, IoError, RouteError};
use outerflow::graph::{block_decompose, check_cut_condition, BlockKind, DemandSet, OuterplanarInstance, RawDemands, RawInstance};
use outerflow::harness::io::{read_json, write_json, TreeEdgesFile, TreeFile};
use outerflow::harness::{
    oracle_edp, random_feasible_demands, random_outerplanar_with_cuts, random_weighted_demands, run_batch, Suite,
};
use outerflow::lowerbound::{fundamental_cut_congestion, generate_lb_instance, min_congestion_search, DEFAULT_BUDGET};
use outerflow::pipeline::{solve_edp, Selection};
use outerflow::router::{route_all, RouteOptions};
use outerflow::sparsifier::{cut_ratio_report, sparsify, NumericMode};
use outerflow::tree_flow::{exact_tree_edp, first_fit_partition, greedy_tree_edp, TreeInstance};

/// Cut sparsifiers and edge-disjoint paths on outerplanar graphs.
#[derive(Parser)]
#[command(name = "outerflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a single-subtree sparsifier and report its cut ratios.
    Sparsify {
        #[arg(long, value_enum, default_value = "integer")]
        mode: NumericMode,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the dual tree of every 2-connected block here.
        #[arg(long)]
        dump_dual: Option<PathBuf>,
    },
    /// Check the cut condition for a demand set.
    CheckCuts {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        demands: PathBuf,
        /// Also try every proper subset (up to 20 nodes).
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Route all demands by edge-disjoint paths.
    Route {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        demands: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check the cut condition after every routing step.
        #[arg(long)]
        debug_invariants: bool,
    },
    /// Select demands on a capacitated tree.
    TreeEdp {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        demands: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        mode: TreeMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-profit edge-disjoint paths through the sparsifier.
    SolveEdp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        demands: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        selection: Selection,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Compare against the exhaustive optimum.
        #[arg(long)]
        oracle: bool,
    },
    /// Write the lower-bound instance of a given level.
    GenLowerbound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fundamental-cut congestion of a spanning tree with inherited capacities.
    EvalTree {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest fundamental-cut congestion over spanning trees.
    SearchMinCongestion {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random outerplanar instance and optionally demands for it.
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        max_cap: u64,
        /// Probability of dropping each outer-cycle edge (keeps connectivity).
        #[arg(long, default_value_t = 0.0)]
        drop_boundary: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        demands: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        count: usize,
        /// Random weighted demands with profits up to this value instead of
        /// a feasible unit set.
        #[arg(long)]
        max_profit: Option<u64>,
    },
    /// Exact optimum by exhaustive search (small instances only).
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        demands: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded trials of one suite in parallel.
    Batch {
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeMode {
    Greedy,
    Exact,
    Partition,
}

/// Failure classes, mapped to exit codes 2, 3 and 4.
enum Failure {
    Invalid(String),
    Infeasible(String),
    Internal(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(write_json(path, value)?),
        None => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(value).expect("serializable");
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<OuterplanarInstance, Failure> {
    let raw: RawInstance = read_json(path)?;
    Ok(raw.validate()?)
}

fn load_demands(path: &PathBuf, n: usize) -> Result<DemandSet, Failure> {
    let raw: RawDemands = read_json(path)?;
    Ok(raw.validate(n)?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RouteFile<'a> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    paths: Option<&'a [outerflow::router::RoutedPath]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sparsify {
            mode,
            input,
            out,
            report,
            dump_dual,
        } => {
            let g = load_instance(&input)?;
            let (_, t) = sparsify(&g, mode).map_err(internal)?;
            emit(&out, &t.to_json(&g))?;
            let r = cut_ratio_report(&g, &t);
            if let Some(path) = report {
                write_json(path, &r)?;
            }
            if let Some(path) = dump_dual {
                let duals: Vec<_> = block_decompose(&g, &DemandSet::empty())
                    .blocks
                    .iter()
                    .filter(|b| b.kind == BlockKind::Biconnected)
                    .map(|b| build_dual_tree(&b.instance).map(|d| (b.nodes.clone(), d)))
                    .collect::<Result<_, _>>()?;
                write_json(path, &duals)?;
            }
            if r.holds() {
                Ok(())
            } else {
                Err(Failure::Internal(format!("{} central cuts outside the bounds", r.violations.len())))
            }
        }
        Command::CheckCuts {
            input,
            demands,
            exhaustive,
            out,
        } => {
            let g = load_instance(&input)?;
            let h = load_demands(&demands, g.n())?;
            let r = check_cut_condition(&g, &h, exhaustive);
            emit(&out, &r)?;
            if r.holds {
                Ok(())
            } else {
                Err(Failure::Infeasible("cut condition violated".into()))
            }
        }
        Command::Route {
            input,
            demands,
            out,
            debug_invariants,
        } => {
            let g = load_instance(&input)?;
            let h = load_demands(&demands, g.n())?;
            match route_all(&g, &h, RouteOptions { debug_invariants }) {
                Ok(sol) => emit(
                    &out,
                    &RouteFile {
                        status: "complete",
                        paths: Some(&sol.paths),
                        certificate: None,
                    },
                ),
                Err(e @ (RouteError::CutConditionViolated { .. } | RouteError::NotJointlyOuterplanar { .. })) => {
                    let certificate = match &e {
                        RouteError::CutConditionViolated { shore, capacity, demand } => serde_json::json!({
                            "kind": "cut-condition", "shore": shore, "capacity": capacity, "demand": demand
                        }),
                        RouteError::NotJointlyOuterplanar { first, second } => serde_json::json!({
                            "kind": "crossing", "first": first, "second": second
                        }),
                        _ => unreachable!(),
                    };
                    emit(
                        &out,
                        &RouteFile {
                            status: "infeasible",
                            paths: None,
                            certificate: Some(certificate),
                        },
                    )?;
                    Err(Failure::Infeasible(e.to_string()))
                }
                Err(RouteError::Graph(e)) => Err(e.into()),
                Err(e) => Err(internal(e)),
            }
        }
        Command::TreeEdp {
            tree,
            demands,
            mode,
            out,
        } => {
            let file: TreeFile = read_json(&tree)?;
            let t = TreeInstance::new(file.n, &file.edges).map_err(|e| Failure::Invalid(e.to_string()))?;
            let h = load_demands(&demands, file.n)?;
            let result = match mode {
                TreeMode::Greedy => greedy_tree_edp(&t, h.as_slice()).map(serde_json::to_value),
                TreeMode::Exact => exact_tree_edp(&t, h.as_slice()).map(serde_json::to_value),
                TreeMode::Partition => first_fit_partition(&t, h.as_slice(), None).map(serde_json::to_value),
            };
            let value = result.map_err(|e| Failure::Invalid(e.to_string()))?.expect("serializable");
            emit(&out, &value)
        }
        Command::SolveEdp {
            input,
            demands,
            selection,
            out,
            stats,
            oracle,
        } => {
            let g = load_instance(&input)?;
            let h = load_demands(&demands, g.n())?;
            let mut sol = solve_edp(&g, &h, selection).map_err(internal)?;
            if oracle {
                let opt = oracle_edp(&g, &h).map_err(|e| Failure::Invalid(e.to_string()))?;
                sol.stats = sol.stats.with_oracle(opt.profit);
            }
            emit(&out, &sol)?;
            if let Some(path) = stats {
                write_json(path, &sol.stats)?;
            }
            Ok(())
        }
        Command::GenLowerbound { n, out } => {
            let g = generate_lb_instance(n).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(&out, &g.to_raw())
        }
        Command::EvalTree { input, tree, out } => {
            let g = load_instance(&input)?;
            let t: TreeEdgesFile = read_json(&tree)?;
            let c = fundamental_cut_congestion(&g, &t.edges).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(&out, &c)
        }
        Command::SearchMinCongestion {
            input,
            budget,
            seed,
            out,
        } => {
            let g = load_instance(&input)?;
            emit(&out, &min_congestion_search(&g, budget, seed))
        }
        Command::GenRandom {
            seed,
            n,
            max_cap,
            drop_boundary,
            out,
            demands,
            count,
            max_profit,
        } => {
            if n < 2 || max_cap < 1 || !(0.0..=1.0).contains(&drop_boundary) {
                return Err(Failure::Invalid("need n >= 2, max-cap >= 1, drop-boundary in [0, 1]".into()));
            }
            let g = random_outerplanar_with_cuts(seed, n, max_cap, drop_boundary);
            emit(&out, &g.to_raw())?;
            if let Some(path) = demands {
                let h = match max_profit {
                    Some(p) => random_weighted_demands(seed, n, count, p.max(1)),
                    None => random_feasible_demands(seed, &g, count),
                };
                write_json(path, &h.to_raw())?;
            }
            Ok(())
        }
        Command::Oracle { input, demands, out } => {
            let g = load_instance(&input)?;
            let h = load_demands(&demands, g.n())?;
            let r = oracle_edp(&g, &h).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(&out, &r)
        }
        Command::Batch {
            trials,
            seed,
            suite,
            out,
        } => {
            let r = run_batch(suite, trials, seed);
            emit(&out, &r)?;
            if r.failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::Internal(format!("{} trials failed", r.failures.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
