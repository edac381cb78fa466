use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_space::{hognas_weights, uniform_raw, weighted_l1, BoundedDistance, GridFunction, Metric};
use crate::rate_functionals::{
    tube_min_rate, uniform_projection_scratch, weak_projection_from, weak_projection_warm, LevelSet, LevelSetNet, TubeScratch,
    WeakDual,
};

/// Both one-sided distances between an ensemble and a level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitDistance {
    /// `sup_f d(f, K)` over the ensemble: certified upper bound.
    pub excess: f64,
    /// Certified lower bound for the same supremum.
    pub excess_lower: f64,
    /// `max_{g ∈ net} min_f d(g, f)`.
    pub deficit: f64,
    /// `max(excess, deficit)`.
    pub delta: f64,
    /// Members whose projection hit the iteration cap.
    pub unconverged: usize,
}

const CHUNK: usize = 4096;

/// Full solves made before the weak-metric sweep.
const SEED_SOLVES: usize = 8;

/// Estimate the Hausdorff distance between an ensemble and a level set: the
/// ensemble-to-set side by exact projections, the set-to-ensemble side
/// through the net.
///
/// Members that cannot raise the running maximum are skipped after a cheap
/// feasibility check, so only a handful need a full projection. Under the
/// weak metric a member is also left alone once its bound falls below the
/// deficit: `delta` is then exact to `tol` but `excess` may be loose.
pub fn hausdorff_to_limit(
    members: &[GridFunction],
    set: &LevelSet,
    net: &LevelSetNet,
    metric: Metric,
    tol: f64,
    max_iter: usize,
) -> Result<LimitDistance> {
    if members.is_empty() || net.members.is_empty() {
        return Err(Error::UndefinedDistance);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let m = members[0].resolution();
    for g in members.iter().chain(&net.members) {
        if g.resolution() != m {
            return Err(Error::IncompatibleGrids { left: m, right: g.resolution() });
        }
    }
    let deficit = deficit(members, &net.members, metric);
    let parts: Vec<(f64, f64, usize)> = match metric {
        Metric::Uniform => members.par_chunks(CHUNK).map(|c| uniform_excess(c, set, tol)).collect(),
        Metric::Hognas => vec![weak_excess(members, set, tol, max_iter, deficit)],
        Metric::Skorokhod => {
            return Err(Error::Unsupported("level-set distances under the Skorokhod metric".into()))
        }
    };
    let excess = parts.iter().map(|p| p.0).fold(0.0, f64::max);
    let excess_lower = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let unconverged = parts.iter().map(|p| p.2).sum();
    Ok(LimitDistance { excess, excess_lower, deficit, delta: excess.max(deficit), unconverged })
}

/// `max_{g ∈ net} min_f d(g, f)`.
pub fn deficit(members: &[GridFunction], net: &[GridFunction], metric: Metric) -> f64 {
    let bd = BoundedDistance::new(metric, members[0].resolution());
    net.par_iter().map(|g| bd.to_set(g, members)).reduce(|| 0.0, f64::max)
}

fn uniform_excess(chunk: &[GridFunction], set: &LevelSet, tol: f64) -> (f64, f64, usize) {
    let alpha = set.level();
    let mut scratch = TubeScratch::default();
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    let mut prev: Option<Vec<f64>> = None;
    for f in chunk {
        let v = f.values();
        if let Some(g) = &prev {
            if uniform_raw(v, g) <= hi {
                continue;
            }
        }
        if set.polygon_rate(v) <= alpha {
            continue;
        }
        if hi > 0.0 && tube_min_rate(v, set, hi, &mut scratch) <= alpha {
            prev = Some(scratch.string.clone());
            continue;
        }
        let p = uniform_projection_scratch(f, set, tol, hi, &mut scratch);
        hi = hi.max(p.distance);
        lo = lo.max(p.lower);
        prev = Some(p.witness.into_values());
    }
    (hi, lo, 0)
}

/// Cheap bracket for one member: the uniform projection as a starting curve,
/// the dual point aligned with its residual, and the oracle's answer there.
fn weak_bracket(f: &GridFunction, set: &LevelSet, tol: f64, hint: f64, scratch: &mut TubeScratch) -> (f64, f64, f64, Vec<f64>) {
    let up = uniform_projection_scratch(f, set, tol, hint, scratch);
    let mut start = up.witness.into_values();
    let mut dual = WeakDual::new(set, f.values());
    let mut g = Vec::new();
    let u = dual.aligned(&start);
    let lb = dual.evaluate(&u, &mut g).max(0.0);
    let mut ub = dual.primal(&start);
    if dual.primal(&g) < ub {
        ub = dual.primal(&g);
        start = g;
    }
    (ub, lb, up.distance, start)
}

/// Weak-metric excess in two passes. The first brackets every member
/// cheaply; the second refines, largest upper bound first, only those whose
/// bracket could still lift the supremum by more than `tol`.
fn weak_excess(members: &[GridFunction], set: &LevelSet, tol: f64, max_iter: usize, settled: f64) -> (f64, f64, usize) {
    let alpha = set.level();
    let w = hognas_weights(members[0].resolution(), false);
    let brackets: Vec<(f64, f64)> = members
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            let mut scratch = TubeScratch::default();
            let mut out = Vec::with_capacity(chunk.len());
            let mut floor = 0.0f64;
            let mut hint = 0.0f64;
            let mut prev: Option<Vec<f64>> = None;
            for f in chunk {
                let v = f.values();
                if let Some(p) = &prev {
                    let d = weighted_l1(v, p, &w);
                    if d <= floor {
                        out.push((d, 0.0));
                        continue;
                    }
                }
                if set.polygon_rate(v) <= alpha {
                    out.push((0.0, 0.0));
                    continue;
                }
                let (ub, lb, d_unif, start) = weak_bracket(f, set, tol, hint, &mut scratch);
                hint = d_unif;
                floor = floor.max(lb);
                prev = Some(start);
                out.push((ub, lb));
            }
            out
        })
        .collect();

    let mut lower = brackets.iter().map(|b| b.1).fold(0.0, f64::max);
    let mut upper: Vec<f64> = brackets.iter().map(|b| b.0).collect();
    let mut scratch = TubeScratch::default();
    let mut unconverged = 0;
    // Settle the largest brackets first so the running lower bound is
    // close to the supremum before the sweep.
    let mut order: Vec<usize> = (0..members.len()).filter(|&i| upper[i] > lower + tol).collect();
    order.sort_by(|&a, &b| upper[b].total_cmp(&upper[a]).then(a.cmp(&b)));
    order.truncate(SEED_SOLVES);
    for &i in &order {
        let f = &members[i];
        let (_, _, _, start) = weak_bracket(f, set, tol, 0.0, &mut scratch);
        let p = weak_projection_from(f, set, tol, max_iter, start, 0.0);
        upper[i] = upper[i].min(p.distance);
        lower = lower.max(p.lower);
        unconverged += usize::from(!p.converged);
    }
    // Then in index order, where each solution warm-starts the next.
    let mut warm: Option<Vec<f64>> = None;
    for i in 0..members.len() {
        if upper[i] <= lower.max(settled) + tol {
            continue;
        }
        let f = &members[i];
        let (_, _, _, start) = weak_bracket(f, set, tol, 0.0, &mut scratch);
        let (p, u) = weak_projection_warm(f, set, tol, max_iter, start, lower.max(settled) + tol, warm.as_deref());
        upper[i] = upper[i].min(p.distance);
        lower = lower.max(p.lower);
        unconverged += usize::from(!p.converged);
        if u.is_some() {
            warm = u;
        }
    }
    (upper.iter().copied().fold(0.0, f64::max), lower, unconverged)
}

