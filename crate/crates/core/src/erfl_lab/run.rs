use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepKind};
use super::limit::{hausdorff_to_limit, LimitDistance};
use super::statistics::{bv_bound_check, erdos_renyi_max, functional_transfer, Functional};
use crate::error::{Error, Result};
use crate::path_space::{GridFunction, Metric};
use crate::process_sim::{
    build_ensemble, build_ensemble_with_window, derive_seed, simulate_path, Flavor, IncrementEnsemble, LevySpec,
    SamplePath, ScaleRule, WindowRule,
};
use crate::rate_functionals::{level_set_net_with, wiener_action, LevelSet, LevelSetNet, NetOptions, Topology};
use crate::transforms::{critical_c, gamma_level, RateProfile};

/// Version of this library, recorded in every run.
pub const VERSION_TAG: &str = env!("CARGO_PKG_VERSION");

// Seed index reserved for the level-set net, away from replicate indices.
const NET_SEED_INDEX: u64 = u64::MAX;

/// Relative slack on the action for the Strassen exceedance count.
const ACTION_SLACK: f64 = 0.1;

/// One `(T, replicate, statistic)` measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub horizon: f64,
    pub replicate: usize,
    pub statistic: String,
    pub value: f64,
}

/// Derived quantities shared by all replicates of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub c: Option<f64>,
    pub critical_c: f64,
    /// `γ(1/c)`, the limit of the maximal-increment statistic.
    pub gamma_ref: Option<f64>,
    pub level: Option<f64>,
    pub bv_bound: Option<f64>,
    pub net_size: Option<usize>,
    pub metric: Metric,
    pub flavor: Flavor,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub summary: RunSummary,
    pub rows: Vec<ResultRow>,
    pub elapsed_secs: f64,
    pub version: String,
}

impl RunRecord {
    /// Values of one statistic at one horizon, in replicate order.
    pub fn values(&self, horizon: f64, statistic: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.horizon == horizon && r.statistic == statistic)
            .map(|r| r.value)
            .collect()
    }

    pub fn median(&self, horizon: f64, statistic: &str) -> Option<f64> {
        median(&self.values(horizon, statistic))
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Everything a replicate needs that does not depend on the path.
struct Plan {
    kind: SweepKind,
    c: Option<f64>,
    metric: Metric,
    flavor: Flavor,
    set: Option<LevelSet>,
    net: Option<LevelSetNet>,
    /// Members are divided by this before comparison, distances multiplied.
    scale: f64,
}

fn standard_brownian() -> RateProfile {
    RateProfile::new(&LevySpec::brownian(1.0)).expect("valid spec")
}

fn prepare(cfg: &ExperimentConfig) -> Result<(Plan, RunSummary)> {
    let profile = RateProfile::new(&cfg.process)?;
    let c0 = critical_c(&profile);
    let mut warnings = Vec::new();
    let metric = cfg.metric_or_default();
    let flavor = cfg.flavor_or_default();
    let conds = profile.conditions();

    let c = match cfg.kind {
        SweepKind::Strassen => None,
        SweepKind::Weak => Some(cfg.c.unwrap_or_else(|| {
            if c0 > 0.0 && c0.is_finite() {
                4.0 * c0
            } else {
                warnings.push(format!("critical c is {c0}; using the fallback c = 4"));
                4.0
            }
        })),
        _ => cfg.c,
    };
    if matches!(cfg.kind, SweepKind::Uniform | SweepKind::PartialSum) && metric == Metric::Uniform && !conds.full_domain {
        warnings.push("cumulant is not finite on all of R; the uniform-topology limit need not hold".into());
    }
    if cfg.kind == SweepKind::Weak {
        if !conds.no_gaussian {
            warnings.push("law has a Gaussian component; increments are not of bounded variation".into());
        }
        if let Some(c) = c {
            if c <= c0 {
                warnings.push(format!("c = {c} does not exceed the critical value {c0}"));
            }
        }
    }

    let gamma_ref = match c {
        Some(c) => gamma_level(&profile, 1.0 / c, 1e-12)?.value(),
        None => None,
    };

    let (set, scale) = match (cfg.kind, c) {
        (SweepKind::ErMax, _) => (None, 1.0),
        (SweepKind::Strassen, _) => (Some(LevelSet::uniform(standard_brownian(), 0.5)?), 1.0),
        (_, Some(c)) => {
            let topology = if metric == Metric::Hognas { Topology::Weak } else { Topology::Uniform };
            let set = LevelSet::new(profile.clone(), 1.0 / c, topology, cfg.bv_bound)?;
            let scale = if flavor == Flavor::F { c } else { 1.0 };
            (Some(set), scale)
        }
        _ => return Err(Error::Config { field: "c".into(), message: "required".into() }),
    };
    let net = match &set {
        Some(set) => {
            let opts = NetOptions {
                budget: cfg.net.budget,
                seed: derive_seed(cfg.seed, NET_SEED_INDEX),
                ..NetOptions::default()
            };
            Some(level_set_net_with(set, cfg.net.eps / scale, cfg.m, opts)?)
        }
        None => None,
    };
    let summary = RunSummary {
        c,
        critical_c: c0,
        gamma_ref,
        level: set.as_ref().map(LevelSet::level),
        bv_bound: set.as_ref().and_then(LevelSet::bv_bound),
        net_size: net.as_ref().map(|n| n.members.len()),
        metric,
        flavor,
        warnings,
    };
    Ok((Plan { kind: cfg.kind, c, metric, flavor, set, net, scale }, summary))
}

fn push(rows: &mut Vec<ResultRow>, horizon: f64, replicate: usize, statistic: &str, value: f64) {
    rows.push(ResultRow { horizon, replicate, statistic: statistic.into(), value });
}

fn ensemble_for(cfg: &ExperimentConfig, plan: &Plan, path: &SamplePath) -> Result<IncrementEnsemble> {
    match plan.kind {
        SweepKind::Strassen => {
            let p = cfg.window_exponent.unwrap_or(0.6);
            build_ensemble_with_window(path, Flavor::H, WindowRule::Power { p }, ScaleRule::Strassen, cfg.stride, cfg.m)
        }
        _ => {
            let c = plan.c.expect("window constant");
            let stride = if plan.kind == SweepKind::Weak { 1.0 } else { cfg.stride };
            build_ensemble(path, plan.flavor, c, ScaleRule::UnitRate, stride, cfg.m)
        }
    }
}

fn limit_rows(
    rows: &mut Vec<ResultRow>,
    t: f64,
    r: usize,
    plan: &Plan,
    members: &[GridFunction],
    cfg: &ExperimentConfig,
) -> Result<LimitDistance> {
    let set = plan.set.as_ref().expect("level set");
    let net = plan.net.as_ref().expect("net");
    let scaled;
    let members = if plan.scale != 1.0 {
        scaled = members.iter().map(|f| f.scaled(1.0 / plan.scale)).collect::<Vec<_>>();
        &scaled[..]
    } else {
        members
    };
    let mut d = hausdorff_to_limit(members, set, net, plan.metric, cfg.tolerance, cfg.max_iter)?;
    d.excess *= plan.scale;
    d.excess_lower *= plan.scale;
    d.deficit *= plan.scale;
    d.delta *= plan.scale;
    push(rows, t, r, "excess", d.excess);
    push(rows, t, r, "excess_lower", d.excess_lower);
    push(rows, t, r, "deficit", d.deficit);
    push(rows, t, r, "delta", d.delta);
    push(rows, t, r, "unconverged", d.unconverged as f64);
    Ok(d)
}

fn run_replicate(cfg: &ExperimentConfig, plan: &Plan, horizons: &[f64], r: usize) -> Result<Vec<ResultRow>> {
    let seed = derive_seed(cfg.seed, r as u64);
    let t_max = *horizons.last().expect("non-empty");
    let cells = (cfg.path_resolution as f64 * t_max).ceil() as usize;
    let full = simulate_path(&cfg.process, t_max, cells.max(2), seed)?;
    let mut rows = Vec::new();
    for &t in horizons {
        let path = if t == t_max { full.clone() } else { full.truncate(t)? };
        match plan.kind {
            SweepKind::ErMax => {
                let c = plan.c.expect("window constant");
                push(&mut rows, t, r, "er_max", erdos_renyi_max(&path, c, cfg.stride)?);
            }
            SweepKind::Uniform | SweepKind::PartialSum => {
                let ens = ensemble_for(cfg, plan, &path)?;
                limit_rows(&mut rows, t, r, plan, &ens.members, cfg)?;
                let endpoint = functional_transfer(&ens.members, Functional::Endpoint)?;
                push(&mut rows, t, r, "endpoint_sup", endpoint / plan.scale);
            }
            SweepKind::Weak => {
                let ens = ensemble_for(cfg, plan, &path)?;
                limit_rows(&mut rows, t, r, plan, &ens.members, cfg)?;
                let bound = plan.set.as_ref().and_then(LevelSet::bv_bound).expect("weak set has a bound");
                let check = bv_bound_check(&ens, bound);
                push(&mut rows, t, r, "max_variation", check.max_variation);
                push(&mut rows, t, r, "bv_pass", if check.pass { 1.0 } else { 0.0 });
            }
            SweepKind::Strassen => {
                let ens = ensemble_for(cfg, plan, &path)?;
                limit_rows(&mut rows, t, r, plan, &ens.members, cfg)?;
                let over = ens
                    .members
                    .iter()
                    .filter(|f| !wiener_action(f).le(1.0 + ACTION_SLACK))
                    .count();
                push(&mut rows, t, r, "action_excess_fraction", over as f64 / ens.len() as f64);
            }
        }
    }
    Ok(rows)
}

/// Run a sweep on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let (plan, summary) = prepare(cfg)?;
    let mut horizons = cfg.horizons.clone();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    let per_rep: Vec<Vec<ResultRow>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, &plan, &horizons, r))
        .collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = per_rep.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.horizon
            .total_cmp(&b.horizon)
            .then(a.replicate.cmp(&b.replicate))
            .then(a.statistic.cmp(&b.statistic))
    });
    Ok(RunRecord {
        config: cfg.clone(),
        summary,
        rows,
        elapsed_secs: start.elapsed().as_secs_f64(),
        version: VERSION_TAG.into(),
    })
}

/// Run a sweep on a dedicated pool of `threads` workers (0 = all cores).
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<RunRecord> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Report(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
