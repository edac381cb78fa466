use erfl_core::path_space::{
    blowup, d_hognas, d_skorokhod, d_uniform, directed_hausdorff, hausdorff, in_blowup, modulus_of_continuity,
    partition_lift, total_variation, BvRep, GridFunction, Interpretation, Metric, Partition,
};
use erfl_core::Error;

const PL: Interpretation = Interpretation::PiecewiseLinear;
const STEP: Interpretation = Interpretation::CadlagStep;

fn grid(values: &[f64], interp: Interpretation) -> GridFunction {
    GridFunction::new(values.to_vec(), interp).unwrap()
}

fn step_at(m: usize, k: usize, h: f64) -> GridFunction {
    GridFunction::new((0..=m).map(|i| if i >= k { h } else { 0.0 }).collect(), STEP).unwrap()
}

#[test]
fn grid_function_validation() {
    assert!(matches!(GridFunction::new(vec![1.0, 2.0], PL), Err(Error::InvalidFunction(_))));
    assert!(GridFunction::new(vec![0.0], PL).is_err());
    assert!(GridFunction::new(vec![0.0, f64::NAN], PL).is_err());
    let f = GridFunction::from_fn(4, PL, |s| s * s).unwrap();
    assert_eq!(f.values(), &[0.0, 0.0625, 0.25, 0.5625, 1.0]);
    assert_eq!(f.eval(0.125), 0.03125);
}

#[test]
fn metrics_vanish_on_the_diagonal() {
    let f = grid(&[0.0, 0.3, -0.2, 0.5], STEP);
    for metric in [Metric::Uniform, Metric::Skorokhod, Metric::Hognas] {
        assert_eq!(metric.distance(&f, &f).unwrap(), 0.0);
    }
}

#[test]
fn shifted_step_is_close_in_skorokhod_only() {
    let m = 8;
    let h = 0.7;
    let f = step_at(m, 4, h);
    let g = step_at(m, 5, h);
    assert_eq!(d_uniform(&f, &g).unwrap(), h);
    let d = d_skorokhod(&f, &g).unwrap();
    assert!(d <= 1.0 / m as f64 + 1e-15, "{d}");
}

#[test]
fn hognas_of_zero_and_identity() {
    let zero = GridFunction::zero(16, PL);
    let id = GridFunction::linear(16, 1.0);
    assert!((d_hognas(&zero, &id).unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(d_hognas(&zero, &id).unwrap(), d_hognas(&id, &zero).unwrap());
}

#[test]
fn incompatible_grids_are_rejected() {
    let a = GridFunction::zero(4, PL);
    let b = GridFunction::zero(8, PL);
    assert!(matches!(d_uniform(&a, &b), Err(Error::IncompatibleGrids { .. })));
}

#[test]
fn blowup_membership() {
    let f = GridFunction::linear(8, 1.0);
    let g = GridFunction::linear(8, 0.5);
    let set = vec![f.clone()];
    assert!(in_blowup(&set, &f, 1e-9, Metric::Uniform).unwrap());
    assert!(!in_blowup(&[], &f, 10.0, Metric::Uniform).unwrap());
    let d = d_uniform(&f, &g).unwrap();
    assert!(!in_blowup(&set, &g, d, Metric::Uniform).unwrap());
    assert!(in_blowup(&set, &g, d + 1e-12, Metric::Uniform).unwrap());
    assert_eq!(blowup(&set, &[g.clone(), f.clone()], d, Metric::Uniform).unwrap(), vec![1]);
    assert!(blowup(&set, &[g], -1.0, Metric::Uniform).is_err());
}

#[test]
fn hausdorff_examples() {
    let zero = GridFunction::zero(8, PL);
    let id = GridFunction::linear(8, 1.0);
    let a = vec![zero.clone(), id.clone()];
    assert_eq!(hausdorff(&a, &a, Metric::Uniform).unwrap(), 0.0);
    assert_eq!(hausdorff(std::slice::from_ref(&zero), std::slice::from_ref(&id), Metric::Uniform).unwrap(), 1.0);
    // One-sided distances differ when one set contains the other.
    assert_eq!(directed_hausdorff(std::slice::from_ref(&zero), &a, Metric::Uniform).unwrap(), 0.0);
    assert_eq!(directed_hausdorff(&a, &[zero], Metric::Uniform).unwrap(), 1.0);
    assert!(matches!(hausdorff(&[], &a, Metric::Uniform), Err(Error::UndefinedDistance)));
}

#[test]
fn partition_lift_examples() {
    let f = GridFunction::linear(12, 0.8);
    let lifted = partition_lift(&f, &Partition::uniform(3));
    for (a, b) in lifted.values().iter().zip(f.values()) {
        assert!((a - b).abs() < 1e-12);
    }

    let g = grid(&[0.0, 0.5, -0.25, 1.0, 0.75], STEP);
    let single = partition_lift(&g, &Partition::new(vec![0.0, 1.0]).unwrap());
    for (i, v) in single.values().iter().enumerate() {
        assert!((v - 0.75 * i as f64 / 4.0).abs() < 1e-12);
    }
}

#[test]
fn partition_lift_is_close_in_the_weak_metric() {
    // d_W(f, f^P) ≤ mesh/2 · |f|_v(1) for a step function.
    let f = grid(&[0.0, 0.0, 0.4, 0.4, 0.1, 0.1, 0.1, 0.9, 0.9], STEP);
    for k in [1, 2, 4, 8] {
        let p = Partition::uniform(k);
        let lift = partition_lift(&f, &p).with_interpretation(STEP);
        let lift_pl = partition_lift(&f, &p);
        let d = d_hognas(&f, &lift_pl).unwrap().min(d_hognas(&f, &lift).unwrap());
        assert!(d <= p.mesh() / 2.0 * total_variation(&f) + 1e-12, "k={k}: {d}");
    }
}

#[test]
fn partition_validation() {
    assert!(matches!(Partition::new(vec![0.0, 0.6, 0.4, 1.0]), Err(Error::InvalidPartition(_))));
    assert!(Partition::new(vec![0.1, 1.0]).is_err());
    let coarse = Partition::uniform(2);
    assert!(coarse.is_refined_by(&Partition::uniform(4)));
    assert!(!coarse.is_refined_by(&Partition::uniform(3)));
    assert_eq!(Partition::uniform(4).cells(), 4);
}

#[test]
fn total_variation_examples() {
    let monotone = GridFunction::from_fn(10, PL, |s| s.powi(3)).unwrap();
    assert!((total_variation(&monotone) - 1.0).abs() < 1e-12);
    let m = 10;
    let zigzag = GridFunction::new((0..=m).map(|i| if i % 2 == 1 { 1.0 / m as f64 } else { 0.0 }).collect(), PL).unwrap();
    assert!((total_variation(&zigzag) - 1.0).abs() < 1e-12);
    let rep = BvRep::from_grid(&grid(&[0.0, 1.0, -1.0, -1.0], STEP));
    assert!((rep.total_variation() - 3.0).abs() < 1e-12);
    assert_eq!(rep.singular_masses(), (1.0, 2.0));
}

#[test]
fn modulus_examples() {
    let f = GridFunction::linear(20, 3.0);
    assert!(modulus_of_continuity(&f, 0.1) <= 0.3 + 1e-12);
    let g = grid(&[0.0, 0.4, -0.3, 0.8, 0.1], PL);
    assert!((modulus_of_continuity(&g, 1.0) - 1.1).abs() < 1e-12);
    assert!((modulus_of_continuity(&g, 5.0) - 1.1).abs() < 1e-12);
}

#[test]
fn modulus_matches_pair_scan() {
    let g = grid(&[0.0, 0.4, -0.3, 0.8, 0.1, 0.2, -0.6, 0.0, 0.5], PL);
    let m = 8;
    for k in 0..=m {
        let delta = k as f64 / m as f64;
        let v = g.values();
        let mut brute = 0.0f64;
        for i in 0..=m {
            for j in i..=m.min(i + k) {
                brute = brute.max((v[j] - v[i]).abs());
            }
        }
        assert!((modulus_of_continuity(&g, delta) - brute).abs() < 1e-12, "δ = {delta}");
    }
}
