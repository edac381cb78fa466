//! Monte Carlo experiments: the maximal-increment statistic, distances
//! between increment ensembles and level sets, and sweeps over horizons.

mod config;
mod limit;
mod run;
mod statistics;

pub use config::{ExperimentConfig, NetConfig, SweepKind};
pub use limit::{deficit, hausdorff_to_limit, LimitDistance};
pub use run::{
    median, run_experiment, run_experiment_with_threads, ResultRow, RunRecord, RunSummary, VERSION_TAG,
};
pub use statistics::{
    bv_bound_check, erdos_renyi_max, erdos_renyi_max_discrete, erdos_renyi_max_window, functional_transfer,
    BvCheck, Functional,
};
