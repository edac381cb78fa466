use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_space::{total_variation, GridFunction};
use crate::process_sim::{IncrementEnsemble, SamplePath};

/// `max_x (Z(x + a) − Z(x))/a` over starts `x = kδ ≤ T − a`.
pub fn erdos_renyi_max_window(path: &SamplePath, window: f64, stride: f64) -> Result<f64> {
    let t = path.horizon();
    if !(stride > 0.0 && stride.is_finite()) {
        return Err(Error::OutOfRange(format!("stride {stride} must be positive")));
    }
    if !(window > 0.0) || window >= t {
        return Err(Error::DegenerateHorizon { window, horizon: t });
    }
    let count = ((t - window) / stride).floor() as u64 + 1;
    let mut best = f64::NEG_INFINITY;
    for k in 0..count {
        let x = k as f64 * stride;
        best = best.max((path.value(x + window) - path.value(x)) / window);
    }
    Ok(best)
}

/// The statistic with window `a_T = c log T`.
pub fn erdos_renyi_max(path: &SamplePath, c: f64, stride: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::OutOfRange(format!("window constant c = {c} must be positive")));
    }
    erdos_renyi_max_window(path, c * path.horizon().ln(), stride)
}

/// Integer version: windows of `⌊c log n⌋` steps at integer starts
/// `0 ≤ x ≤ n − A_n`.
pub fn erdos_renyi_max_discrete(path: &SamplePath, c: f64) -> Result<f64> {
    let n = path.horizon().floor();
    let a = (c * n.ln()).floor();
    if !(a >= 1.0) || a >= n {
        return Err(Error::DegenerateHorizon { window: a, horizon: path.horizon() });
    }
    let mut best = f64::NEG_INFINITY;
    for x in 0..=((n - a) as u64) {
        let x = x as f64;
        best = best.max((path.value(x + a) - path.value(x)) / a);
    }
    Ok(best)
}

/// Continuous functionals whose suprema over an ensemble are tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Endpoint,
    Sup,
    TotalVariation,
}

impl Functional {
    pub fn apply(self, f: &GridFunction) -> f64 {
        match self {
            Functional::Endpoint => f.endpoint(),
            Functional::Sup => f.values().iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Functional::TotalVariation => total_variation(f),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::Endpoint => "endpoint",
            Functional::Sup => "sup",
            Functional::TotalVariation => "total_variation",
        }
    }
}

/// `sup_{f ∈ ensemble} Θ(f)`.
pub fn functional_transfer(members: &[GridFunction], theta: Functional) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::UndefinedDistance);
    }
    Ok(members.iter().map(|f| theta.apply(f)).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvCheck {
    pub max_variation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Largest total variation in the ensemble against the bound `M`.
pub fn bv_bound_check(ensemble: &IncrementEnsemble, bound: f64) -> BvCheck {
    let max_variation = ensemble.members.iter().map(total_variation).fold(0.0, f64::max);
    BvCheck { max_variation, bound, pass: max_variation <= bound }
}
