use serde::{Deserialize, Serialize};

use super::level_set::LevelSet;
use super::taut::taut_string;
use crate::error::{Error, Result};
use crate::path_space::{hognas_weights, uniform_raw, weighted_l1, GridFunction, Interpretation, Metric};

/// Inner solver for the uniform-metric feasibility problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformSolver {
    /// Exact minimal-rate curve through the tube.
    #[default]
    TautString,
    /// Projected gradient descent on the node values.
    ProjectedGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionOptions {
    pub uniform_solver: UniformSolver,
    pub max_iter: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions { uniform_solver: UniformSolver::TautString, max_iter: 10_000 }
    }
}

/// Distance from a function to a level set, bracketed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// Certified upper bound, attained by `witness`.
    pub distance: f64,
    /// Certified lower bound.
    pub lower: f64,
    /// A member of the level set at distance `distance`.
    pub witness: GridFunction,
    /// False when the iteration cap was hit before the bracket closed.
    pub converged: bool,
    pub iterations: usize,
}

impl Projection {
    pub fn bracket_width(&self) -> f64 {
        self.distance - self.lower
    }
}

fn check(f: &GridFunction, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if f.resolution() < 1 {
        return Err(Error::InvalidFunction("empty grid".into()));
    }
    Ok(())
}

/// `inf{d(f, g) : rate(g) ≤ α}` over piecewise-linear `g` on the grid of `f`.
pub fn dist_to_level_set(f: &GridFunction, set: &LevelSet, metric: Metric, tol: f64) -> Result<Projection> {
    dist_to_level_set_with(f, set, metric, tol, ProjectionOptions::default())
}

pub fn dist_to_level_set_with(
    f: &GridFunction,
    set: &LevelSet,
    metric: Metric,
    tol: f64,
    opts: ProjectionOptions,
) -> Result<Projection> {
    check(f, tol)?;
    match metric {
        Metric::Uniform => Ok(match opts.uniform_solver {
            UniformSolver::TautString => uniform_projection(f, set, tol),
            UniformSolver::ProjectedGradient => uniform_projection_pg(f, set, tol, opts.max_iter),
        }),
        Metric::Hognas => Ok(weak_projection(f, set, tol, opts.max_iter)),
        Metric::Skorokhod => Err(Error::Unsupported(
            "projection onto a level set under the Skorokhod metric".into(),
        )),
    }
}

fn polygon(values: Vec<f64>) -> GridFunction {
    GridFunction::new_unchecked(values, Interpretation::PiecewiseLinear)
}

/// Reusable buffers for the uniform feasibility test.
#[derive(Debug, Default)]
pub(crate) struct TubeScratch {
    lower: Vec<f64>,
    upper: Vec<f64>,
    pub(crate) string: Vec<f64>,
}

/// Minimal rate over the `ε`-tube around `f`; the minimizer is left in
/// `scratch.string`.
pub(crate) fn tube_min_rate(f: &[f64], set: &LevelSet, eps: f64, scratch: &mut TubeScratch) -> f64 {
    let m = f.len() - 1;
    scratch.lower.clear();
    scratch.upper.clear();
    scratch.lower.extend(f.iter().map(|v| v - eps));
    scratch.upper.extend(f.iter().map(|v| v + eps));
    scratch.lower[0] = 0.0;
    scratch.upper[0] = 0.0;
    let target = set.profile().mean() / m as f64;
    taut_string(&scratch.lower, &scratch.upper, target, &mut scratch.string);
    set.polygon_rate(&scratch.string)
}

/// Upper bound on the uniform distance: the mean line always lies in the set.
fn mean_line_distance(f: &[f64], set: &LevelSet) -> (f64, Vec<f64>) {
    let m = (f.len() - 1) as f64;
    let mu = set.profile().mean();
    let line: Vec<f64> = (0..f.len()).map(|i| mu * i as f64 / m).collect();
    (uniform_raw(f, &line), line)
}

pub(crate) fn uniform_projection_scratch(
    f: &GridFunction,
    set: &LevelSet,
    tol: f64,
    floor: f64,
    scratch: &mut TubeScratch,
) -> Projection {
    let v = f.values();
    let alpha = set.level();
    if set.polygon_rate(v) <= alpha {
        return Projection { distance: 0.0, lower: 0.0, witness: polygon(v.to_vec()), converged: true, iterations: 0 };
    }
    let (mut hi, mut best) = mean_line_distance(v, set);
    let mut lo = 0.0f64;
    if floor > 0.0 && floor < hi {
        if tube_min_rate(v, set, floor, scratch) <= alpha {
            hi = floor;
            best = scratch.string.clone();
        } else {
            lo = floor;
        }
    }
    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if tube_min_rate(v, set, mid, scratch) <= alpha {
            hi = mid;
            best.clone_from(&scratch.string);
        } else {
            lo = mid;
        }
    }
    // The stored curve lies in the hi-tube; report its actual distance.
    let d = uniform_raw(v, &best).min(hi);
    Projection { distance: d, lower: lo, witness: polygon(best), converged: true, iterations }
}

fn uniform_projection(f: &GridFunction, set: &LevelSet, tol: f64) -> Projection {
    uniform_projection_scratch(f, set, tol, 0.0, &mut TubeScratch::default())
}

/// Minimize the rate over the tube by projected gradient descent with
/// backtracking. Returns the final point and its rate.
fn tube_min_rate_pg(f: &[f64], set: &LevelSet, eps: f64, max_iter: usize) -> (Vec<f64>, f64, bool) {
    let p = set.profile();
    let n = f.len();
    let m = (n - 1) as f64;
    let clamp = |g: &mut Vec<f64>| {
        g[0] = 0.0;
        for i in 1..n {
            g[i] = g[i].clamp(f[i] - eps, f[i] + eps);
        }
    };
    let mu = p.mean();
    let mut g: Vec<f64> = (0..n).map(|i| mu * i as f64 / m).collect();
    clamp(&mut g);
    let mut r = set.polygon_rate(&g);
    let mut step = 1.0 / m;
    let mut grad = vec![0.0; n];
    for _ in 0..max_iter {
        if r <= set.level() {
            // Feasibility is all the bisection needs.
            return (g, r, true);
        }
        // d/dg_i of Σ Ψ(m Δg)/m is Ψ'(s_{i−1}) − Ψ'(s_i).
        let slopes: Vec<f64> = g.windows(2).map(|w| m * (w[1] - w[0])).collect();
        let dpsi: Vec<f64> = slopes.iter().map(|&s| p.conjugate_slope(s).unwrap_or(0.0)).collect();
        for i in 1..n {
            grad[i] = dpsi[i - 1] - if i < n - 1 { dpsi[i] } else { 0.0 };
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand: Vec<f64> = g.iter().zip(&grad).map(|(x, d)| x - step * d).collect();
            clamp(&mut cand);
            let rc = set.polygon_rate(&cand);
            let moved: f64 = cand.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum();
            let lin: f64 = cand.iter().zip(&g).zip(&grad).map(|((a, b), d)| d * (a - b)).sum();
            if rc <= r + lin + moved / (2.0 * step) {
                let done = moved < 1e-30 || (r - rc).abs() <= 1e-14 * r.max(1.0);
                g = cand;
                r = rc;
                accepted = true;
                step *= 1.5;
                if done {
                    return (g, r, true);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return (g, r, true);
        }
    }
    (g, r, false)
}

fn uniform_projection_pg(f: &GridFunction, set: &LevelSet, tol: f64, max_iter: usize) -> Projection {
    let v = f.values();
    let alpha = set.level();
    if set.polygon_rate(v) <= alpha {
        return Projection { distance: 0.0, lower: 0.0, witness: polygon(v.to_vec()), converged: true, iterations: 0 };
    }
    let (mut hi, mut best) = mean_line_distance(v, set);
    let mut lo = 0.0;
    let mut converged = true;
    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (g, r, ok) = tube_min_rate_pg(v, set, mid, max_iter);
        converged &= ok;
        if r <= alpha {
            hi = mid;
            best = g;
        } else {
            lo = mid;
        }
    }
    let d = uniform_raw(v, &best).min(hi);
    Projection { distance: d, lower: lo, witness: polygon(best), converged, iterations }
}

/// State for the dual of the weighted-ℓ1 projection.
///
/// For `u` in the box `|u_i| ≤ w_i`, `⟨u, f⟩ − σ(u)` is a lower bound on the
/// distance, where `σ` is the support function of the set in node space.
pub(crate) struct WeakDual<'a> {
    set: &'a LevelSet,
    f: &'a [f64],
    w: Vec<f64>,
    coeff: Vec<f64>,
    slopes: Vec<f64>,
    tau: f64,
}

impl<'a> WeakDual<'a> {
    pub(crate) fn new(set: &'a LevelSet, f: &'a [f64]) -> Self {
        let m = f.len() - 1;
        WeakDual { set, f, w: hognas_weights(m, false), coeff: vec![0.0; m], slopes: Vec::with_capacity(m), tau: 0.0 }
    }

    /// Maximizer `g*(u)` of `⟨u, g⟩` over the set, and the dual value.
    pub(crate) fn evaluate(&mut self, u: &[f64], g: &mut Vec<f64>) -> f64 {
        let m = self.f.len() - 1;
        let mut acc = 0.0;
        for j in (0..m).rev() {
            acc += u[j + 1];
            self.coeff[j] = acc;
        }
        self.set.extreme_slopes(&self.coeff, &mut self.slopes, &mut self.tau);
        g.clear();
        g.push(0.0);
        let h = 1.0 / m as f64;
        let mut v = 0.0;
        for s in &self.slopes {
            v += s * h;
            g.push(v);
        }
        u.iter().zip(self.f).zip(g.iter()).map(|((ui, fi), gi)| ui * (fi - gi)).sum()
    }

    pub(crate) fn primal(&self, g: &[f64]) -> f64 {
        weighted_l1(self.f, g, &self.w)
    }

    /// Dual point aligned with the residual `f − g`.
    pub(crate) fn aligned(&self, g: &[f64]) -> Vec<f64> {
        self.f
            .iter()
            .zip(g)
            .zip(&self.w)
            .map(|((fi, gi), wi)| if fi > gi { *wi } else if fi < gi { -*wi } else { 0.0 })
            .collect()
    }

    fn project(&self, u: &mut [f64]) {
        u[0] = 0.0;
        for (ui, wi) in u.iter_mut().zip(&self.w).skip(1) {
            *ui = ui.clamp(-wi, *wi);
        }
    }
}

/// Weak-metric projection from a starting feasible curve. Stops early once
/// the upper bound drops to `floor`, since callers only need to know the
/// distance does not exceed it.
pub(crate) fn weak_projection_from(
    f: &GridFunction,
    set: &LevelSet,
    tol: f64,
    max_iter: usize,
    start: Vec<f64>,
    floor: f64,
) -> Projection {
    weak_projection_warm(f, set, tol, max_iter, start, floor, None).0
}

/// As [`weak_projection_from`], optionally also trying a dual starting
/// point; returns the final dual point for reuse on a nearby function.
pub(crate) fn weak_projection_warm(
    f: &GridFunction,
    set: &LevelSet,
    tol: f64,
    max_iter: usize,
    start: Vec<f64>,
    floor: f64,
    dual_start: Option<&[f64]>,
) -> (Projection, Option<Vec<f64>>) {
    let v = f.values();
    let n = v.len();
    let mut dual = WeakDual::new(set, v);
    let mut best_g = start;
    let mut ub = dual.primal(&best_g);
    let mut u = dual.aligned(&best_g);
    let mut g = Vec::with_capacity(n);
    let mut phi0 = dual.evaluate(&u, &mut g);
    if dual.primal(&g) < ub {
        ub = dual.primal(&g);
        best_g.clone_from(&g);
    }
    if let Some(u1) = dual_start {
        let mut g1 = Vec::with_capacity(n);
        let phi1 = dual.evaluate(u1, &mut g1);
        if dual.primal(&g1) < ub {
            ub = dual.primal(&g1);
            best_g.clone_from(&g1);
        }
        if phi1 > phi0 {
            phi0 = phi1;
            u.copy_from_slice(u1);
            g = g1;
        }
    }
    // Running average of the oracle outputs; feasible by convexity.
    let mut avg = g.clone();
    let mut avg_count = 1.0;
    let mut phi_u = phi0;
    let mut lb = phi0.max(0.0);
    // The dual is positively homogeneous, so only points with a positive
    // value are worth handing on.
    let mut best_u = u.clone();

    let mut y = u.clone();
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    let mut gy = Vec::with_capacity(n);
    let mut gn = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut u_new = vec![0.0; n];
    while ub - lb > tol && ub > floor && iterations < max_iter {
        iterations += 1;
        let phi_y = dual.evaluate(&y, &mut gy);
        let grad: Vec<f64> = v.iter().zip(&gy).map(|(a, b)| a - b).collect();
        let mut phi_new;
        loop {
            for i in 0..n {
                u_new[i] = y[i] + grad[i] / lip;
            }
            dual.project(&mut u_new);
            phi_new = dual.evaluate(&u_new, &mut gn);
            let mut lin = 0.0;
            let mut sq = 0.0;
            for i in 0..n {
                let d = u_new[i] - y[i];
                lin += grad[i] * d;
                sq += d * d;
            }
            if phi_new >= phi_y + lin - 0.5 * lip * sq - 1e-15 * phi_y.abs() || lip > 1e12 {
                break;
            }
            lip *= 2.0;
        }
        for (cand_u, cand_g, val) in [(&y, &gy, phi_y), (&u_new, &gn, phi_new)] {
            if val > lb {
                lb = val;
                best_u.clone_from(cand_u);
            }
            let pr = dual.primal(cand_g);
            if pr < ub {
                ub = pr;
                best_g.clone_from(cand_g);
            }
        }
        avg_count += 1.0;
        for (a, b) in avg.iter_mut().zip(&gn) {
            *a += (b - *a) / avg_count;
        }
        let pa = dual.primal(&avg);
        if pa < ub && set.polygon_rate(&avg) <= set.level() {
            ub = pa;
            best_g.clone_from(&avg);
        }
        // Accelerated step with restart when the dual value drops.
        if phi_new < phi_u {
            t = 1.0;
            y.clone_from(&u);
        } else {
            phi_u = phi_new;
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let k = (t - 1.0) / t_next;
            for i in 0..n {
                y[i] = u_new[i] + k * (u_new[i] - u[i]);
            }
            dual.project(&mut y);
            u.clone_from(&u_new);
            t = t_next;
        }
        lip *= 0.8;
    }
    let p = Projection {
        distance: ub,
        lower: lb.min(ub),
        witness: polygon(best_g),
        converged: ub - lb <= tol || ub <= floor,
        iterations,
    };
    (p, (lb > 0.0).then_some(best_u))
}

fn weak_projection(f: &GridFunction, set: &LevelSet, tol: f64, max_iter: usize) -> Projection {
    let v = f.values();
    if set.polygon_rate(v) <= set.level() {
        return Projection { distance: 0.0, lower: 0.0, witness: polygon(v.to_vec()), converged: true, iterations: 0 };
    }
    let start = uniform_projection(f, set, tol).witness.into_values();
    weak_projection_from(f, set, tol, max_iter, start, 0.0)
}
