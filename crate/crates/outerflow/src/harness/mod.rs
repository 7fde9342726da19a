//! Generators, the brute-force oracle, file formats and batch runs.

pub mod batch;
pub mod io;
pub mod oracle;
pub mod random;

pub use random::{
    random_feasible_demands, random_outerplanar, random_outerplanar_with_cuts, random_tree,
    random_weighted_demands,
};
pub use oracle::{oracle_edp, oracle_edp_with_limits, OracleLimits, OracleResult};
pub use batch::{run_batch, trial_instance, BatchReport, Suite};
