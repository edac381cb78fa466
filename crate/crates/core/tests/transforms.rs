use erfl_core::process_sim::{JumpDist, LevySpec};
use erfl_core::transforms::{
    conjugate, critical_c, cumulant, gamma_level, legendre, level_crossing, Crossing, ExtReal, RateProfile, Side,
};

fn profile(spec: &LevySpec) -> RateProfile {
    RateProfile::new(spec).unwrap()
}

fn coin() -> LevySpec {
    LevySpec::compound_poisson(1.0, JumpDist::TwoPoint { p: 0.5, up: 1.0, down: -1.0 })
}

// Brute-force sup of t·a − Λ(t) over a fine grid of t.
fn grid_sup(p: &RateProfile, a: f64, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step) as usize;
    (0..=n)
        .map(|k| lo + k as f64 * step)
        .filter_map(|t| p.cumulant(t).finite().map(|l| t * a - l))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn cumulant_examples() {
    assert_eq!(cumulant(&LevySpec::brownian(1.0), 2.0).unwrap(), ExtReal::Finite(2.0));
    assert_eq!(cumulant(&LevySpec::gamma(1.0, 1.0), 2.0).unwrap(), ExtReal::PosInf);
    assert_eq!(cumulant(&LevySpec::gamma(1.0, 1.0), 1.0).unwrap(), ExtReal::PosInf);

    // E exp(tY) − 1 for the ±1 coin, summed by hand.
    let mgf = 0.5 * 1f64.exp() + 0.5 * (-1f64).exp();
    let v = cumulant(&coin(), 1.0).unwrap().to_f64();
    assert!((v - (mgf - 1.0)).abs() < 1e-14, "{v}");
    assert!((v - 0.54308).abs() < 1e-5);
}

#[test]
fn cumulant_vanishes_at_zero() {
    for spec in [LevySpec::brownian(2.0), LevySpec::centered_poisson(3.0), coin(), LevySpec::gamma(2.0, 0.5)] {
        assert_eq!(cumulant(&spec, 0.0).unwrap(), ExtReal::Finite(0.0));
    }
}

#[test]
fn conjugate_examples() {
    let b = profile(&LevySpec::brownian(1.0));
    assert!((b.conjugate(1.5).to_f64() - 1.125).abs() < 1e-12);
    let oracle = grid_sup(&b, 1.5, -10.0, 10.0, 1e-4);
    assert!((oracle - 1.125).abs() < 1e-7);

    for spec in [LevySpec::brownian(1.0), LevySpec::centered_poisson(1.0), coin()] {
        assert_eq!(conjugate(&spec, 0.0).unwrap().to_f64(), 0.0);
    }

    let q = profile(&LevySpec::centered_poisson(1.0));
    let exact = 2.0 * 2f64.ln() - 1.0;
    assert!((q.conjugate(1.0).to_f64() - exact).abs() < 1e-12);
    let oracle = grid_sup(&q, 1.0, -5.0, 5.0, 1e-4);
    assert!((oracle - exact).abs() < 1e-7, "{oracle}");
}

#[test]
fn numeric_conjugate_matches_closed_forms() {
    for spec in [LevySpec::brownian(0.7), LevySpec::centered_poisson(2.0), coin(), LevySpec::gamma(2.0, 0.5)] {
        let p = profile(&spec);
        for a in [-0.9, -0.3, 0.2, 0.8, 1.7, 3.0] {
            let closed = p.conjugate(a);
            let numeric = legendre(&p, a, 1e-12).unwrap();
            match (closed, numeric) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => assert!((x - y).abs() < 1e-8, "{spec:?} at {a}: {x} vs {y}"),
                (x, y) => assert_eq!(x, y, "{spec:?} at {a}"),
            }
        }
    }
}

#[test]
fn conjugate_outside_support_is_infinite() {
    // Centered Poisson never drops faster than slope −λ.
    let q = profile(&LevySpec::centered_poisson(1.0));
    assert_eq!(q.conjugate(-1.5), ExtReal::PosInf);
    assert!((q.conjugate(-1.0).to_f64() - 1.0).abs() < 1e-12);
    // A subordinator has no negative slopes.
    let g = profile(&LevySpec::gamma(1.0, 1.0));
    assert_eq!(g.conjugate(-0.1), ExtReal::PosInf);
}

#[test]
fn gamma_examples() {
    let b = profile(&LevySpec::brownian(1.0));
    let g = gamma_level(&b, 0.5, 1e-12).unwrap().value().unwrap();
    assert!((g - 1.0).abs() < 1e-9);
    // Bisection oracle on the closed form.
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid * mid / 2.0 <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((g - lo).abs() < 1e-9);

    let q = profile(&LevySpec::centered_poisson(1.0));
    let g = gamma_level(&q, 2.0 * 2f64.ln() - 1.0, 1e-12).unwrap().value().unwrap();
    assert!((g - 1.0).abs() < 1e-9);
}

#[test]
fn gamma_inverts_the_conjugate() {
    let p = profile(&coin());
    for z in [0.3, 1.0, 2.5] {
        let u = p.conjugate(z).to_f64();
        let g = gamma_level(&p, u, 1e-12).unwrap().value().unwrap();
        assert!((g - z).abs() < 1e-8, "{z}: {g}");
    }
}

#[test]
fn gamma_rejects_bad_levels() {
    let b = profile(&LevySpec::brownian(1.0));
    assert_eq!(gamma_level(&b, -1.0, 1e-9).unwrap(), Crossing::Empty);
    assert!(gamma_level(&b, f64::NAN, 1e-9).is_err());
    assert!(gamma_level(&b, 1.0, 0.0).is_err());
}

#[test]
fn lower_crossing_mirrors_upper_for_symmetric_laws() {
    let p = profile(&coin());
    let up = level_crossing(&p, 0.3, Side::Upper, 1e-12).unwrap().value().unwrap();
    let down = level_crossing(&p, 0.3, Side::Lower, 1e-12).unwrap().value().unwrap();
    assert!((up + down).abs() < 1e-9);
}

#[test]
fn critical_c_examples() {
    assert_eq!(critical_c(&profile(&LevySpec::brownian(1.0))), 0.0);
    assert_eq!(critical_c(&profile(&coin())), 0.0);
    let exp = profile(&LevySpec::compound_poisson(1.0, JumpDist::Exponential { mean: 1.0 }));
    let c0 = critical_c(&exp);
    assert!(c0.is_finite() && c0 >= 0.0);
    // Ψ grows without bound along positive slopes, so nothing above 0.
    assert!(exp.conjugate(100.0).to_f64() > 50.0);
    assert_eq!(c0, 0.0);
}
