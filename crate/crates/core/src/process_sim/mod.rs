//! Lévy process specifications, path simulation and increment ensembles.

mod ensemble;
mod path;
mod spec;

pub use ensemble::{
    build_ensemble, build_ensemble_with_window, log_log_plus, log_plus, strassen_scale, Flavor,
    IncrementEnsemble, ScaleRule, WindowRule,
};
pub use path::{
    derive_seed, read_binary_rows, read_csv_rows, simulate_path, simulate_path_with_limits,
    splitmix64, SamplePath, SimLimits, DEFAULT_GRID_CAP, DEFAULT_JUMP_CAP, PATH_MAGIC,
};
pub use spec::{JumpDist, LevySpec, Process};
