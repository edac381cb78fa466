use erfl_core::path_space::{d_hognas, d_uniform, Atom, BvRep, GridFunction, Interpretation, Metric, Partition};
use erfl_core::process_sim::{JumpDist, LevySpec};
use erfl_core::rate_functionals::{
    dist_to_level_set, dist_to_level_set_with, level_set_net, level_set_net_with, rate_i, rate_j,
    rate_j_partition, rate_j_partition_increments, rate_j_scaled, wiener_action, LevelSet, NetOptions,
    ProjectionOptions, Topology, UniformSolver,
};
use erfl_core::transforms::{gamma_level, ExtReal, RateProfile};
use erfl_core::Error;

const PL: Interpretation = Interpretation::PiecewiseLinear;

fn profile(spec: &LevySpec) -> RateProfile {
    RateProfile::new(spec).unwrap()
}

fn brownian() -> RateProfile {
    profile(&LevySpec::brownian(1.0))
}

fn coin() -> RateProfile {
    profile(&LevySpec::compound_poisson(1.0, JumpDist::TwoPoint { p: 0.5, up: 1.0, down: -1.0 }))
}

#[test]
fn wiener_action_examples() {
    assert_eq!(wiener_action(&GridFunction::linear(8, 1.0)), ExtReal::Finite(1.0));
    assert_eq!(wiener_action(&GridFunction::zero(8, PL)), ExtReal::Finite(0.0));
    let twice = wiener_action(&GridFunction::linear(8, 2.0)).to_f64();
    assert_eq!(twice, 4.0);
    assert!(twice > 1.0);
    let step = GridFunction::new(vec![0.0, 0.0, 1.0], Interpretation::CadlagStep).unwrap();
    assert_eq!(wiener_action(&step), ExtReal::PosInf);
}

#[test]
fn rate_i_examples() {
    let p = coin();
    assert_eq!(rate_i(&GridFunction::zero(8, PL), &p), ExtReal::Finite(0.0));
    let b = brownian();
    for alpha in [-1.5, 0.3, 2.0] {
        let r = rate_i(&GridFunction::linear(8, alpha), &b).to_f64();
        assert!((r - alpha * alpha / 2.0).abs() < 1e-12);
    }
    let step = GridFunction::new(vec![0.0, 0.5, 0.5], Interpretation::CadlagStep).unwrap();
    assert_eq!(rate_i(&step, &p), ExtReal::PosInf);
}

#[test]
fn rate_j_examples() {
    let p = coin();
    let alpha = 0.4;
    let ac = BvRep::from_grid(&GridFunction::linear(8, alpha));
    assert!((rate_j(&ac, &p).to_f64() - p.conjugate(alpha).to_f64()).abs() < 1e-12);
    assert_eq!(rate_j(&BvRep::from_grid(&GridFunction::zero(8, PL)), &p), ExtReal::Finite(0.0));

    // A lone positive atom costs t₀ per unit mass; Poisson-like laws have
    // an infinite t₀, so use one with a finite domain.
    let g = profile(&LevySpec::gamma(1.0, 1.0));
    let (_, t0) = g.domain();
    assert_eq!(t0, 1.0);
    let w = 0.3;
    let atom = BvRep { densities: vec![g.mean(); 4], atoms: vec![Atom { at: 0.5, mass: w }] };
    assert!((rate_j(&atom, &g).to_f64() - t0 * w).abs() < 1e-12);
    let coin_atom = BvRep { densities: vec![0.0; 4], atoms: vec![Atom { at: 0.5, mass: w }] };
    assert_eq!(rate_j(&coin_atom, &p), ExtReal::PosInf);
}

#[test]
fn scaled_rate_j() {
    let p = coin();
    let f = BvRep::from_grid(&GridFunction::linear(4, 0.6));
    let c = 3.0;
    let v = rate_j_scaled(&f, &p, c).to_f64();
    assert!((v - c * p.conjugate(0.6 / c).to_f64()).abs() < 1e-12);
}

#[test]
fn partition_functional_examples() {
    let p = coin();
    let alpha = 0.7;
    for m in [1, 4, 7] {
        let z = vec![alpha / m as f64; m];
        let v = rate_j_partition_increments(&z, &Partition::uniform(m), &p).unwrap().to_f64();
        assert!((v - p.conjugate(alpha).to_f64()).abs() < 1e-12);
    }
    assert!(matches!(
        rate_j_partition_increments(&[0.1, 0.2], &Partition::uniform(3), &p),
        Err(Error::InvalidPartition(_))
    ));
}

#[test]
fn partition_functional_grows_under_refinement() {
    let p = coin();
    let f = GridFunction::new(vec![0.0, 0.3, -0.1, 0.6, 0.2, 0.9, 0.4, 0.5, 1.1], PL).unwrap();
    let coarse = Partition::uniform(2);
    for fine in [Partition::uniform(4), Partition::uniform(8), Partition::new(vec![0.0, 0.25, 0.5, 0.6, 1.0]).unwrap()] {
        assert!(coarse.is_refined_by(&fine));
        let a = rate_j_partition(&f, &coarse, &p).to_f64();
        let b = rate_j_partition(&f, &fine, &p).to_f64();
        assert!(a <= b + 1e-8, "{a} > {b}");
    }
}

#[test]
fn level_set_validation() {
    assert!(matches!(LevelSet::uniform(brownian(), -0.1), Err(Error::InvalidLevel(_))));
    let k = LevelSet::new(coin(), 0.25, Topology::Weak, None).unwrap();
    assert!(k.bv_bound().unwrap() > 0.0);
    assert!(k.contains(&GridFunction::zero(8, PL)));
}

#[test]
fn net_holds_zero_and_extreme_lines() {
    let alpha = 0.5;
    let set = LevelSet::uniform(brownian(), alpha).unwrap();
    let net = level_set_net(&set, 0.05, 32).unwrap();
    let gamma = gamma_level(&brownian(), alpha, 1e-12).unwrap().value().unwrap();
    let zero = GridFunction::zero(32, PL);
    let top = GridFunction::linear(32, gamma);
    assert!(net.members.iter().any(|g| d_uniform(g, &zero).unwrap() < 1e-12));
    assert!(net.members.iter().any(|g| d_uniform(g, &top).unwrap() < 1e-9));
    for g in &net.members {
        assert!(set.rate(g).le(alpha + 1e-9));
        assert!(g.endpoint() <= gamma + 1e-9);
    }
}

#[test]
fn net_is_stable_under_a_larger_budget() {
    let set = LevelSet::uniform(brownian(), 0.5).unwrap();
    let eps = 0.1;
    let small = level_set_net_with(&set, eps, 16, NetOptions { budget: 200, ..NetOptions::default() }).unwrap();
    let large = level_set_net_with(&set, eps, 16, NetOptions { budget: 400, seed: 99, ..NetOptions::default() }).unwrap();
    let far = small
        .members
        .iter()
        .filter(|g| large.members.iter().all(|h| d_uniform(g, h).unwrap() >= 2.0 * eps))
        .count();
    assert!(far * 10 <= small.members.len(), "{far} of {}", small.members.len());
}

#[test]
fn members_of_the_set_are_at_distance_zero() {
    let set = LevelSet::uniform(brownian(), 0.5).unwrap();
    let f = GridFunction::from_fn(16, PL, |s| 0.3 * (3.0 * s).sin()).unwrap();
    assert!(set.contains(&f));
    for metric in [Metric::Uniform, Metric::Hognas] {
        let p = dist_to_level_set(&f, &set, metric, 1e-6).unwrap();
        assert!(p.distance <= 1e-6, "{metric:?}: {}", p.distance);
        assert!(p.converged);
    }
}

#[test]
fn steep_line_projects_within_the_explicit_bound() {
    let set = LevelSet::uniform(brownian(), 0.5).unwrap();
    let f = GridFunction::linear(32, 2.0);
    let gamma = gamma_level(&brownian(), 0.5, 1e-12).unwrap().value().unwrap();
    let bound = (2.0 - gamma).abs();
    assert!((bound - 1.0).abs() < 1e-9);
    let tol = 1e-6;
    let p = dist_to_level_set(&f, &set, Metric::Uniform, tol).unwrap();
    assert!(p.distance > 0.0 && p.distance <= bound + tol, "{}", p.distance);
    assert!(p.lower <= p.distance);
    assert!(set.rate(&p.witness).le(0.5 + 1e-9));
    assert!((d_uniform(&f, &p.witness).unwrap() - p.distance).abs() < 1e-12);

    let pg = dist_to_level_set_with(
        &f,
        &set,
        Metric::Uniform,
        1e-4,
        ProjectionOptions { uniform_solver: UniformSolver::ProjectedGradient, max_iter: 20_000 },
    )
    .unwrap();
    assert!((pg.distance - p.distance).abs() < 1e-3, "{} vs {}", pg.distance, p.distance);

    let w = dist_to_level_set(&f, &set, Metric::Hognas, 1e-4).unwrap();
    assert!(w.lower <= w.distance + 1e-12 && w.distance > 0.0);
    assert!(w.distance <= 2.0 * p.distance + 1e-4);
}

#[test]
fn skorokhod_projection_is_unsupported() {
    let set = LevelSet::uniform(brownian(), 0.5).unwrap();
    let f = GridFunction::linear(4, 2.0);
    assert!(matches!(dist_to_level_set(&f, &set, Metric::Skorokhod, 1e-3), Err(Error::Unsupported(_))));
    assert!(matches!(dist_to_level_set(&f, &set, Metric::Uniform, 0.0), Err(Error::InvalidTolerance(_))));
}

// Exhaustive search over slopes on a lattice: a feasible, grid-restricted
// minimum for three-cell polygons.
fn lattice_min(f: &GridFunction, set: &LevelSet, metric: Metric, step: f64, span: f64) -> f64 {
    let n = (2.0 * span / step).round() as usize;
    let slopes: Vec<f64> = (0..=n).map(|k| -span + k as f64 * step).collect();
    let cost: Vec<f64> = slopes.iter().map(|&s| set.profile().conjugate(s).to_f64() / 3.0).collect();
    let alpha = set.level();
    let mut best = f64::INFINITY;
    for (i, a) in slopes.iter().enumerate() {
        for (j, b) in slopes.iter().enumerate() {
            let used = cost[i] + cost[j];
            if used > alpha {
                continue;
            }
            for (k, c) in slopes.iter().enumerate() {
                if used + cost[k] > alpha {
                    continue;
                }
                let g = GridFunction::from_slopes(&[*a, *b, *c]);
                best = best.min(metric.distance(f, &g).unwrap());
            }
        }
    }
    best
}

#[test]
fn projections_match_a_lattice_search() {
    let set = LevelSet::uniform(coin(), 0.3).unwrap();
    let targets = [
        GridFunction::new(vec![0.0, 0.9, 0.2, 1.4], PL).unwrap(),
        GridFunction::new(vec![0.0, -1.0, -1.0, 0.5], PL).unwrap(),
        GridFunction::new(vec![0.0, 0.0, 1.2, 1.2], Interpretation::CadlagStep).unwrap(),
    ];
    let step = 0.02;
    for f in &targets {
        for metric in [Metric::Uniform, Metric::Hognas] {
            let oracle = lattice_min(f, &set, metric, step, 2.0);
            let p = dist_to_level_set(f, &set, metric, 1e-5).unwrap();
            assert!(p.converged);
            assert!(p.distance <= oracle + 1e-5, "{metric:?}: solver {} above lattice {oracle}", p.distance);
            assert!(p.distance >= oracle - 0.03, "{metric:?}: solver {} far below lattice {oracle}", p.distance);
            let check = match metric {
                Metric::Hognas => d_hognas(f, &p.witness).unwrap(),
                _ => d_uniform(f, &p.witness).unwrap(),
            };
            assert!((check - p.distance).abs() < 1e-9);
        }
    }
}
