//! Rate functionals on path space, their level sets, finite nets of level
//! sets and projections onto them.

mod functionals;
mod level_set;
mod net;
mod projection;
mod taut;

pub use functionals::{
    rate_i, rate_j, rate_j_partition, rate_j_partition_increments, rate_j_scaled, wiener_action,
};
pub use level_set::{default_bv_bound, LevelSet, Topology};
pub use net::{level_set_net, level_set_net_with, net_metric, LevelSetNet, NetOptions};
pub use projection::{
    dist_to_level_set, dist_to_level_set_with, Projection, ProjectionOptions, UniformSolver,
};
pub(crate) use projection::{
    tube_min_rate, uniform_projection_scratch, weak_projection_from, weak_projection_warm, TubeScratch, WeakDual,
};
