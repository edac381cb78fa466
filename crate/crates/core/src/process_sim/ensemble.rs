use serde::{Deserialize, Serialize};

use super::path::SamplePath;
use crate::error::{Error, Result};
use crate::path_space::{GridFunction, Interpretation};

/// Which family of normalized increment functions to collect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Windows of length `c log T` started at every multiple of the stride.
    G,
    /// As `G` but normalized by the chosen scale rule.
    H,
    /// Polygonal partial-sum windows of `⌊c log n⌋` steps at every integer start.
    M,
    /// Windows of `⌊c log n⌋` steps on the integer-started lattice.
    L,
    /// Non-overlapping windows of `⌊c log n⌋` steps.
    Q,
    /// Partial-sum windows of length `c log T`, multiplied by `c`.
    F,
}

/// Normalization of an increment of window length `a` over horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleRule {
    /// Divide by the window length.
    UnitRate,
    /// Divide by `[2a(log₊(T/a) + log₂ T)]^{1/2}`.
    Strassen,
}

/// `log(max(t, e))`.
pub fn log_plus(t: f64) -> f64 {
    t.max(std::f64::consts::E).ln()
}

/// `log₊(log₊ t)`.
pub fn log_log_plus(t: f64) -> f64 {
    log_plus(log_plus(t))
}

/// Strassen-type normalizer for window `a` within horizon `t`.
pub fn strassen_scale(a: f64, t: f64) -> f64 {
    (2.0 * a * (log_plus(t / a) + log_log_plus(t))).sqrt()
}

/// Window-length rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WindowRule {
    /// `c log T`, or `⌊c log n⌋` for the integer flavors.
    Log { c: f64 },
    /// `T^p`.
    Power { p: f64 },
}

impl WindowRule {
    pub fn length(&self, horizon: f64) -> f64 {
        match *self {
            WindowRule::Log { c } => c * horizon.ln(),
            WindowRule::Power { p } => horizon.powf(p),
        }
    }

    /// Integer window `⌊c log n⌋` used by the lattice flavors.
    pub fn steps(&self, n: u64) -> u64 {
        self.length(n as f64).floor().max(0.0) as u64
    }
}

/// Increment functions of one path, sampled at `m + 1` nodes each.
#[derive(Debug, Clone)]
pub struct IncrementEnsemble {
    pub flavor: Flavor,
    pub window: f64,
    pub scale: f64,
    pub starts: Vec<f64>,
    pub members: Vec<GridFunction>,
}

impl IncrementEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.members.first().map_or(0, GridFunction::resolution)
    }
}

/// Build the ensemble with window `c log T` (or `⌊c log n⌋`).
pub fn build_ensemble(
    path: &SamplePath,
    flavor: Flavor,
    c: f64,
    scale: ScaleRule,
    stride: f64,
    m: usize,
) -> Result<IncrementEnsemble> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::OutOfRange(format!("window constant c = {c} must be positive")));
    }
    build_ensemble_with_window(path, flavor, WindowRule::Log { c }, scale, stride, m)
}

pub fn build_ensemble_with_window(
    path: &SamplePath,
    flavor: Flavor,
    rule: WindowRule,
    scale: ScaleRule,
    stride: f64,
    m: usize,
) -> Result<IncrementEnsemble> {
    let horizon = path.horizon();
    if m < 1 {
        return Err(Error::OutOfRange("resolution m must be at least 1".into()));
    }
    if !(stride > 0.0 && stride.is_finite()) {
        return Err(Error::OutOfRange(format!("stride {stride} must be positive")));
    }
    let integer_flavor = matches!(flavor, Flavor::M | Flavor::L | Flavor::Q);
    if matches!(flavor, Flavor::M | Flavor::F) && !path.is_partial_sum() {
        return Err(Error::Unsupported(format!("flavor {flavor:?} needs a partial-sum path")));
    }
    let window = if integer_flavor {
        let n = horizon.floor() as u64;
        if n < 2 {
            return Err(Error::DegenerateHorizon { window: 0.0, horizon });
        }
        rule.steps(n) as f64
    } else {
        rule.length(horizon)
    };
    let top = if integer_flavor { horizon.floor() } else { horizon };
    if !(window > 0.0) || window >= top {
        return Err(Error::DegenerateHorizon { window, horizon });
    }

    let norm = match scale {
        ScaleRule::UnitRate => window,
        ScaleRule::Strassen => strassen_scale(window, horizon),
    };
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidScale(norm));
    }
    let factor = match (flavor, rule) {
        (Flavor::F, WindowRule::Log { c }) => c,
        _ => 1.0,
    };

    let starts: Vec<f64> = match flavor {
        Flavor::M => {
            let last = (top - window) as u64;
            (0..=last).map(|x| x as f64).collect()
        }
        Flavor::Q => {
            let r = ((top - window) / window).floor() as u64;
            (1..=r).map(|k| k as f64 * window).collect()
        }
        _ => {
            let count = ((top - window) / stride).floor() as u64 + 1;
            (0..count).map(|k| k as f64 * stride).collect()
        }
    };

    let (interp, polygonal) = if flavor == Flavor::M {
        (Interpretation::PiecewiseLinear, true)
    } else if path.is_pure_jump() {
        (Interpretation::CadlagStep, false)
    } else {
        (Interpretation::PiecewiseLinear, false)
    };

    let eval = |t: f64| if polygonal { path.polygonal_value(t) } else { path.value(t) };
    let members = starts
        .iter()
        .map(|&x| {
            let base = eval(x);
            let values = (0..=m)
                .map(|i| {
                    if i == 0 {
                        0.0
                    } else {
                        factor * (eval(x + window * i as f64 / m as f64) - base) / norm
                    }
                })
                .collect();
            GridFunction::new_unchecked(values, interp)
        })
        .collect();

    Ok(IncrementEnsemble { flavor, window, scale: norm, starts, members })
}
