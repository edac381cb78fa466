use std::collections::VecDeque;

use super::grid::{same_grid, GridFunction};
use super::metrics::{hognas_weights, Metric};
use crate::error::{Error, Result};
use crate::path_space::Interpretation;

/// Distance computations that may stop early once a bound is exceeded.
///
/// Nodes are visited coarse-to-fine (endpoint, midpoint, quarter points, …)
/// so large differences tend to show up first.
#[derive(Debug, Clone)]
pub struct BoundedDistance {
    metric: Metric,
    order: Vec<usize>,
    weights_step: Vec<f64>,
    weights_trap: Vec<f64>,
}

impl BoundedDistance {
    pub fn new(metric: Metric, m: usize) -> Self {
        let mut order = vec![m];
        let mut queue = VecDeque::from([(0usize, m)]);
        while let Some((a, b)) = queue.pop_front() {
            if b - a < 2 {
                continue;
            }
            let c = (a + b) / 2;
            order.push(c);
            queue.push_back((a, c));
            queue.push_back((c, b));
        }
        BoundedDistance {
            metric,
            order,
            weights_step: hognas_weights(m, true),
            weights_trap: hognas_weights(m, false),
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// The exact distance when it is at most `bound`, otherwise some value
    /// greater than `bound`.
    pub fn within(&self, f: &GridFunction, g: &GridFunction, bound: f64) -> f64 {
        let (a, b) = (f.values(), g.values());
        match self.metric {
            Metric::Uniform => {
                let mut d = 0.0f64;
                for &i in &self.order {
                    d = d.max((a[i] - b[i]).abs());
                    if d > bound {
                        return d;
                    }
                }
                d
            }
            Metric::Hognas => {
                let step = f.interpretation() == Interpretation::CadlagStep
                    && g.interpretation() == Interpretation::CadlagStep;
                let w = if step { &self.weights_step } else { &self.weights_trap };
                let mut d = 0.0;
                for &i in &self.order {
                    d += w[i] * (a[i] - b[i]).abs();
                    if d > bound {
                        return d;
                    }
                }
                d
            }
            Metric::Skorokhod => self.metric.distance_unchecked(f, g),
        }
    }

    /// `min_{g ∈ set} d(f, g)`.
    pub fn to_set(&self, f: &GridFunction, set: &[GridFunction]) -> f64 {
        let mut best = f64::INFINITY;
        for g in set {
            let d = self.within(f, g, best);
            if d < best {
                best = d;
                if best == 0.0 {
                    break;
                }
            }
        }
        best
    }
}

fn check_grids(a: &[GridFunction], b: &[GridFunction]) -> Result<usize> {
    let first = a.first().or(b.first()).expect("non-empty");
    for g in a.iter().chain(b) {
        same_grid(first, g)?;
    }
    Ok(first.resolution())
}

/// `sup_{f ∈ a} inf_{g ∈ b} d(f, g)`.
pub fn directed_hausdorff(a: &[GridFunction], b: &[GridFunction], metric: Metric) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    if b.is_empty() {
        return Err(Error::UndefinedDistance);
    }
    let m = check_grids(a, b)?;
    let bd = BoundedDistance::new(metric, m);
    Ok(a.iter().map(|f| bd.to_set(f, b)).fold(0.0, f64::max))
}

/// Hausdorff distance between two finite sets; zero for two empty sets.
pub fn hausdorff(a: &[GridFunction], b: &[GridFunction], metric: Metric) -> Result<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Err(Error::UndefinedDistance),
        _ => {}
    }
    Ok(directed_hausdorff(a, b, metric)?.max(directed_hausdorff(b, a, metric)?))
}

/// Whether `g` lies in the open `ε`-neighbourhood of `set`.
pub fn in_blowup(set: &[GridFunction], g: &GridFunction, eps: f64, metric: Metric) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidRadius(eps));
    }
    for f in set {
        if metric.distance(f, g)? < eps {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Indices of the candidates inside the open `ε`-neighbourhood of `set`.
pub fn blowup(
    set: &[GridFunction],
    candidates: &[GridFunction],
    eps: f64,
    metric: Metric,
) -> Result<Vec<usize>> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidRadius(eps));
    }
    let mut out = Vec::new();
    for (i, g) in candidates.iter().enumerate() {
        if in_blowup(set, g, eps, metric)? {
            out.push(i);
        }
    }
    Ok(out)
}
