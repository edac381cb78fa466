use serde::{Deserialize, Serialize};

use super::grid::{same_grid, GridFunction, Interpretation};
use crate::error::{Error, Result};

/// Metrics on grid functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Supremum norm over the nodes.
    Uniform,
    /// Discrete Skorokhod J1 distance over monotone node matchings.
    Skorokhod,
    /// `∫|f − g| + |f(1) − g(1)|`.
    Hognas,
}

impl Metric {
    pub fn distance(self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        match self {
            Metric::Uniform => d_uniform(f, g),
            Metric::Skorokhod => d_skorokhod(f, g),
            Metric::Hognas => d_hognas(f, g),
        }
    }

    pub(crate) fn distance_unchecked(self, f: &GridFunction, g: &GridFunction) -> f64 {
        match self {
            Metric::Uniform => uniform_raw(f.values(), g.values()),
            Metric::Skorokhod => skorokhod_raw(f.values(), g.values()),
            Metric::Hognas => {
                let w = hognas_weights(f.resolution(), both_step(f, g));
                weighted_l1(f.values(), g.values(), &w)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Uniform => "uniform",
            Metric::Skorokhod => "skorokhod",
            Metric::Hognas => "hognas",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "u" => Ok(Metric::Uniform),
            "skorokhod" | "s" => Ok(Metric::Skorokhod),
            "hognas" | "weak" | "w" => Ok(Metric::Hognas),
            _ => Err(Error::Unsupported(format!("unknown metric `{s}`"))),
        }
    }
}

pub fn d_uniform(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_grid(f, g)?;
    Ok(uniform_raw(f.values(), g.values()))
}

pub(crate) fn uniform_raw(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Bottleneck matching of the nodes: over monotone lattice paths from
/// `(0, 0)` to `(m, m)` with unit steps, minimize the largest
/// `max(|i − j|/m, |f_i − g_j|)` visited.
pub fn d_skorokhod(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_grid(f, g)?;
    Ok(skorokhod_raw(f.values(), g.values()))
}

pub(crate) fn skorokhod_raw(f: &[f64], g: &[f64]) -> f64 {
    let n = f.len();
    let m = (n - 1) as f64;
    let cost = |i: usize, j: usize| ((i as f64 - j as f64).abs() / m).max((f[i] - g[j]).abs());
    let mut prev = vec![f64::INFINITY; n];
    let mut cur = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut b = f64::INFINITY;
                if i > 0 {
                    b = b.min(prev[j]);
                    if j > 0 {
                        b = b.min(prev[j - 1]);
                    }
                }
                if j > 0 {
                    b = b.min(cur[j - 1]);
                }
                b
            };
            cur[j] = best.max(cost(i, j));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n - 1]
}

fn both_step(f: &GridFunction, g: &GridFunction) -> bool {
    f.interpretation() == Interpretation::CadlagStep && g.interpretation() == Interpretation::CadlagStep
}

/// Node weights for the Högnäs distance. Two step functions integrate
/// exactly by left endpoints; otherwise the trapezoid rule is used. The
/// endpoint term adds one to the last weight.
pub fn hognas_weights(m: usize, step: bool) -> Vec<f64> {
    let h = 1.0 / m as f64;
    let mut w = vec![h; m + 1];
    if step {
        w[0] = h;
        w[m] = 1.0;
    } else {
        w[0] = 0.5 * h;
        w[m] = 0.5 * h + 1.0;
    }
    w
}

pub(crate) fn weighted_l1(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| w * (x - y).abs()).sum()
}

pub fn d_hognas(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let m = same_grid(f, g)?;
    let w = hognas_weights(m, both_step(f, g));
    Ok(weighted_l1(f.values(), g.values(), &w))
}
