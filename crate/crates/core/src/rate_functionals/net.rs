use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::level_set::{LevelSet, Topology};
use crate::error::{Error, Result};
use crate::path_space::{BoundedDistance, GridFunction, Interpretation, Metric};
use crate::process_sim::derive_seed;
use crate::transforms::{level_crossing, Crossing, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetOptions {
    /// Number of random members drawn before deduplication.
    pub budget: usize,
    pub seed: u64,
    /// Tents are placed at `k/2^d` for `d = 1..=dyadic_depth`.
    pub dyadic_depth: u32,
    /// Hit-and-run steps between kept samples.
    pub thin: usize,
    /// Independent chains; results do not depend on the thread count.
    pub chains: usize,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions { budget: 500, seed: 0x5eed, dyadic_depth: 3, thin: 8, chains: 8 }
    }
}

/// A finite subset of a level set used as a stand-in for the whole set.
#[derive(Debug, Clone)]
pub struct LevelSetNet {
    pub members: Vec<GridFunction>,
    pub eps: f64,
    /// How many of the leading members are the deterministic ones.
    pub deterministic: usize,
    pub metric: Metric,
}

pub fn net_metric(set: &LevelSet) -> Metric {
    match set.topology() {
        Topology::Uniform => Metric::Uniform,
        Topology::Weak => Metric::Hognas,
    }
}

/// Net with default options.
pub fn level_set_net(set: &LevelSet, eps: f64, m: usize) -> Result<LevelSetNet> {
    level_set_net_with(set, eps, m, NetOptions::default())
}

pub fn level_set_net_with(set: &LevelSet, eps: f64, m: usize, opts: NetOptions) -> Result<LevelSetNet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidRadius(eps));
    }
    if m < 1 {
        return Err(Error::OutOfRange("resolution m must be at least 1".into()));
    }
    let det = deterministic_members(set, m, opts.dyadic_depth);
    let chains = opts.chains.max(1);
    let per_chain: Vec<usize> = (0..chains)
        .map(|k| opts.budget / chains + usize::from(k < opts.budget % chains))
        .collect();
    let random: Vec<Vec<GridFunction>> = per_chain
        .par_iter()
        .enumerate()
        .map(|(k, &count)| hit_and_run(set, m, count, opts.thin.max(1), derive_seed(opts.seed, k as u64)))
        .collect();

    let metric = net_metric(set);
    let bd = BoundedDistance::new(metric, m);
    let mut members: Vec<GridFunction> = Vec::new();
    let mut deterministic = 0;
    for (i, g) in det.into_iter().chain(random.into_iter().flatten()).enumerate() {
        let is_det = i < deterministic_count(opts.dyadic_depth);
        if !(set.polygon_rate(g.values()) <= set.level() + 1e-9) {
            continue;
        }
        if bd.to_set(&g, &members) >= 0.5 * eps {
            members.push(g);
            if is_det {
                deterministic += 1;
            }
        }
    }
    Ok(LevelSetNet { members, eps, deterministic, metric })
}

fn deterministic_count(depth: u32) -> usize {
    // Mean line, zero, two lines, then tents and ramps at both signs.
    let knots = (1usize << depth) - 1;
    4 + 4 * knots
}

fn polygon(values: Vec<f64>) -> GridFunction {
    GridFunction::new_unchecked(values, Interpretation::PiecewiseLinear)
}

fn deterministic_members(set: &LevelSet, m: usize, depth: u32) -> Vec<GridFunction> {
    let p = set.profile();
    let mu = p.mean();
    let alpha = set.level();
    let mut out = Vec::new();
    out.push(GridFunction::linear(m, mu));
    out.push(GridFunction::zero(m, Interpretation::PiecewiseLinear));
    for side in [Side::Upper, Side::Lower] {
        let slope = match level_crossing(p, alpha, side, 1e-12) {
            Ok(Crossing::Finite(z)) => z,
            Ok(Crossing::Edge(z)) if z.is_finite() => z,
            _ => mu,
        };
        out.push(GridFunction::linear(m, slope));
    }
    for d in 1..=depth {
        for k in (1..(1usize << d)).step_by(2) {
            let tau = k as f64 / (1usize << d) as f64;
            let tent = move |s: f64| if s <= tau { s } else { tau * (1.0 - s) / (1.0 - tau) };
            let ramp = move |s: f64| s.min(tau);
            for shape in [&tent as &dyn Fn(f64) -> f64, &ramp] {
                for sign in [1.0, -1.0] {
                    out.push(scaled_to_level(set, m, |s| mu * s + sign * shape(s)));
                }
            }
        }
    }
    out
}

/// `s ↦ μs + A·(shape(s) − μs)` with `A` the largest amplitude keeping the
/// rate at most the level.
fn scaled_to_level(set: &LevelSet, m: usize, shape: impl Fn(f64) -> f64) -> GridFunction {
    let mu = set.profile().mean();
    let base: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let dir: Vec<f64> = base.iter().map(|&s| shape(s) - mu * s).collect();
    let at = |a: f64| -> Vec<f64> { base.iter().zip(&dir).map(|(s, d)| mu * s + a * d).collect() };
    let alpha = set.level();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while set.polygon_rate(&at(hi)) <= alpha {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if set.polygon_rate(&at(mid)) <= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut v = at(lo);
    v[0] = 0.0;
    polygon(v)
}

/// Hit-and-run over slope vectors with rate at most the level.
fn hit_and_run(set: &LevelSet, m: usize, count: usize, thin: usize, seed: u64) -> Vec<GridFunction> {
    if count == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = set.profile().mean();
    let alpha = set.level();
    let h = 1.0 / m as f64;
    let rate = |s: &[f64]| -> f64 {
        let mut acc = 0.0;
        for &x in s {
            acc += set.profile().conjugate_raw(x);
        }
        acc * h
    };
    let mut s = vec![mu; m];
    let mut dir = vec![0.0; m];
    let mut probe = vec![0.0; m];
    // Largest t ≥ 0 with rate(s + t d) ≤ α, to relative accuracy.
    let reach = |s: &[f64], d: &[f64], probe: &mut Vec<f64>| -> f64 {
        let mut feasible = |t: f64| {
            for ((p, a), b) in probe.iter_mut().zip(s).zip(d) {
                *p = a + t * b;
            }
            rate(probe) <= alpha
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while feasible(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return lo;
            }
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let burn_in = 2 * m;
    let mut out = Vec::with_capacity(count);
    let mut step = 0usize;
    while out.len() < count {
        let mut norm = 0.0;
        for x in dir.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x = z;
            norm += z * z;
        }
        let norm = norm.sqrt();
        dir.iter_mut().for_each(|x| *x /= norm);
        let up = reach(&s, &dir, &mut probe);
        let neg: Vec<f64> = dir.iter().map(|x| -x).collect();
        let down = reach(&s, &neg, &mut probe);
        if up + down > 0.0 {
            let t = Uniform::new_inclusive(-down, up).expect("ordered").sample(&mut rng);
            for (a, b) in s.iter_mut().zip(&dir) {
                *a += t * b;
            }
        }
        step += 1;
        if step > burn_in && (step - burn_in) % thin == 0 {
            out.push(GridFunction::from_slopes(&s));
        }
    }
    out
}
