//! Grid functions on `[0, 1]`, metrics between them, set distances and
//! bounded-variation tools.

mod bv;
mod grid;
mod metrics;
mod sets;

pub use bv::{modulus_of_continuity, partition_lift, total_variation, Atom, BvRep, Partition};
pub use grid::{GridFunction, Interpretation};
pub(crate) use metrics::{uniform_raw, weighted_l1};
pub use metrics::{d_hognas, d_skorokhod, d_uniform, hognas_weights, Metric};
pub use sets::{blowup, directed_hausdorff, hausdorff, in_blowup, BoundedDistance};
