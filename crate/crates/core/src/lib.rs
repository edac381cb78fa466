//! Simulation and analysis of Erdős–Rényi functional limits for Lévy
//! processes: increment ensembles, Cramér transforms, rate functionals on
//! path space, and Monte Carlo experiments that compare them.

pub mod erfl_lab;
pub mod error;
pub mod path_space;
pub mod process_sim;
pub mod rate_functionals;
pub mod report;
pub mod transforms;

pub use error::{Error, Result};
pub use path_space::{GridFunction, Interpretation, Metric, Partition};
pub use process_sim::{JumpDist, LevySpec, Process, SamplePath};
pub use transforms::{ExtReal, RateProfile};
