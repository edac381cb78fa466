use crate::error::{Error, Result};
use crate::path_space::{BvRep, GridFunction, Interpretation, Partition};
use crate::transforms::{ExtReal, RateProfile};

fn has_jumps(f: &GridFunction) -> bool {
    f.interpretation() == Interpretation::CadlagStep && f.values().windows(2).any(|w| w[1] != w[0])
}

/// `∫ ḟ²`; infinite for a step function that actually jumps.
pub fn wiener_action(f: &GridFunction) -> ExtReal {
    if has_jumps(f) {
        return ExtReal::PosInf;
    }
    let h = 1.0 / f.resolution() as f64;
    let s: f64 = if f.interpretation() == Interpretation::CadlagStep {
        0.0
    } else {
        f.slopes().iter().map(|d| d * d * h).sum()
    };
    ExtReal::Finite(s)
}

/// `Σ h Ψ(slope)` over the cells of a piecewise-linear function.
pub(crate) fn rate_of_values(values: &[f64], profile: &RateProfile) -> f64 {
    let m = (values.len() - 1) as f64;
    let mut acc = 0.0;
    for w in values.windows(2) {
        let psi = profile.conjugate_raw(m * (w[1] - w[0]));
        if psi == f64::INFINITY {
            return f64::INFINITY;
        }
        acc += psi;
    }
    acc / m
}

/// `I(f) = ∫ Ψ(ḟ)` for absolutely continuous `f`, `+∞` otherwise.
pub fn rate_i(f: &GridFunction, profile: &RateProfile) -> ExtReal {
    if has_jumps(f) {
        return ExtReal::PosInf;
    }
    let r = if f.interpretation() == Interpretation::CadlagStep {
        profile.conjugate_raw(0.0)
    } else {
        rate_of_values(f.values(), profile)
    };
    if r.is_finite() {
        ExtReal::Finite(r)
    } else {
        ExtReal::PosInf
    }
}

/// `J(f) = ∫ Ψ(ρ) + t₀·(positive singular mass) − t₁·(negative singular mass)`.
pub fn rate_j(f: &BvRep, profile: &RateProfile) -> ExtReal {
    let m = f.resolution();
    let mut acc = ExtReal::Finite(0.0);
    if m > 0 {
        for &d in &f.densities {
            acc = acc.add(profile.conjugate(d).scale(1.0 / m as f64));
            if !acc.is_finite() {
                return acc;
            }
        }
    } else {
        acc = profile.conjugate(0.0);
    }
    let (t1, t0) = profile.domain();
    let (pos, neg) = f.singular_masses();
    let singular = |t: f64, mass: f64| {
        if mass == 0.0 {
            ExtReal::Finite(0.0)
        } else if t.is_finite() {
            ExtReal::Finite(t.abs() * mass)
        } else {
            ExtReal::PosInf
        }
    };
    acc.add(singular(t0, pos)).add(singular(t1, neg))
}

/// `Σ (t_j − t_{j−1}) Ψ(z_j / (t_j − t_{j−1}))` for increments `z_j` over the
/// cells of `p`.
pub fn rate_j_partition_increments(z: &[f64], p: &Partition, profile: &RateProfile) -> Result<ExtReal> {
    if z.len() != p.cells() {
        return Err(Error::InvalidPartition(format!(
            "{} increments for a partition with {} cells",
            z.len(),
            p.cells()
        )));
    }
    let mut acc = ExtReal::Finite(0.0);
    for (zi, w) in z.iter().zip(p.knots().windows(2)) {
        let dt = w[1] - w[0];
        acc = acc.add(profile.conjugate(zi / dt).scale(dt));
    }
    Ok(acc)
}

/// The discretized functional applied to the increments of `f` over `p`.
pub fn rate_j_partition(f: &GridFunction, p: &Partition, profile: &RateProfile) -> ExtReal {
    let z: Vec<f64> = p.knots().windows(2).map(|w| f.eval(w[1]) - f.eval(w[0])).collect();
    rate_j_partition_increments(&z, p, profile).expect("increments match the partition")
}

/// `J_{X,c}(f) = c J(f/c)`.
pub fn rate_j_scaled(f: &BvRep, profile: &RateProfile, c: f64) -> ExtReal {
    let scaled = BvRep {
        densities: f.densities.iter().map(|d| d / c).collect(),
        atoms: f
            .atoms
            .iter()
            .map(|a| crate::path_space::Atom { at: a.at, mass: a.mass / c })
            .collect(),
    };
    rate_j(&scaled, profile).scale(c)
}
