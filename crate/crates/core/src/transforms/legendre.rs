use serde::{Deserialize, Serialize};

use super::{Edge, ExtReal, RateProfile};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

// Largest magnitude a bracket may grow to before the search gives up.
const BRACKET_LIMIT: f64 = 1e300;

/// Which end of the zero set of `Ψ` a level crossing starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// Outcome of inverting `Ψ` at a level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Crossing {
    /// `Ψ` crosses the level at this point.
    Finite(f64),
    /// `Ψ` stays at or below the level up to the edge of its domain, which
    /// may be infinite.
    Edge(f64),
    /// No admissible point satisfies the constraint.
    Empty,
}

impl Crossing {
    /// The crossing point, or the domain edge for saturated levels.
    pub fn value(self) -> Option<f64> {
        match self {
            Crossing::Finite(x) | Crossing::Edge(x) => Some(x),
            Crossing::Empty => None,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// `Ψ(a) = sup_t (ta − Λ(t))` computed numerically from the cumulant alone.
pub fn legendre(profile: &RateProfile, a: f64, tol: f64) -> Result<ExtReal> {
    check_tol(tol)?;
    if !a.is_finite() {
        return Err(Error::OutOfRange(format!("conjugate argument {a} must be finite")));
    }
    Ok(legendre_unchecked(profile, a, tol))
}

pub(crate) fn legendre_unchecked(profile: &RateProfile, a: f64, tol: f64) -> ExtReal {
    for (edge, below) in [(profile.lower_edge(), true), (profile.upper_edge(), false)] {
        if let Edge::Closed { at, value } = edge {
            if a == at {
                return value;
            }
            // Every supported cumulant is steep at a finite domain endpoint,
            // so past a closed edge the supremum diverges.
            if (below && a < at) || (!below && a > at) {
                return ExtReal::PosInf;
            }
        }
    }
    match solve_tilt(profile, a, tol) {
        Some(t) => ExtReal::Finite((a * t - profile.cumulant_raw(t)).max(0.0)),
        None => ExtReal::PosInf,
    }
}

/// The tilt `t` with `Λ'(t) = a`, for `a` strictly inside the range of `Λ'`.
pub(crate) fn solve_tilt(profile: &RateProfile, a: f64, tol: f64) -> Option<f64> {
    let m = profile.mean();
    if a == m {
        return Some(0.0);
    }
    if let Edge::Closed { at, .. } = profile.lower_edge() {
        if a <= at {
            return None;
        }
    }
    if let Edge::Closed { at, .. } = profile.upper_edge() {
        if a >= at {
            return None;
        }
    }
    let (t1, t0) = profile.domain();
    let g = |t: f64| profile.cumulant_d1(t) - a;
    let up = a > m;
    let end = if up { t0 } else { t1 };
    let (mut lo, mut hi) = (0.0f64, if up { 1.0f64 } else { -1.0f64 });
    if end.is_finite() {
        hi = 0.5 * end;
    }
    // Walk outwards until the derivative passes the target.
    loop {
        let v = g(hi);
        if (up && v >= 0.0) || (!up && v <= 0.0) {
            break;
        }
        lo = hi;
        let next = if end.is_finite() { 0.5 * (hi + end) } else { 2.0 * hi };
        if next == hi || next.abs() > BRACKET_LIMIT {
            return Some(hi);
        }
        hi = next;
    }
    let (mut a_lo, mut a_hi) = if up { (lo, hi) } else { (hi, lo) };
    let mut t = 0.5 * (a_lo + a_hi);
    for _ in 0..300 {
        let v = g(t);
        if v == 0.0 {
            return Some(t);
        }
        if v < 0.0 {
            a_lo = t;
        } else {
            a_hi = t;
        }
        let d2 = profile.cumulant_d2(t);
        // The conjugate value is off by about v²/(2Λ'') at this tilt.
        if d2 > 0.0 && v * v <= 2.0 * d2 * tol * 1e-3 && v.abs() <= 1e-12 * (1.0 + a.abs()) {
            return Some(t);
        }
        let mut next = if d2 > 0.0 { t - v / d2 } else { f64::NAN };
        if !(next > a_lo && next < a_hi) {
            next = 0.5 * (a_lo + a_hi);
        }
        if next == t || a_hi - a_lo <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Some(t);
        }
        t = next;
    }
    Some(t)
}

/// Invert `Ψ` at level `u` moving away from its zero on the given side:
/// `sup{z ≥ Λ'(0) : Ψ(z) ≤ u}` or `inf{z ≤ Λ'(0) : Ψ(z) ≤ u}`.
pub fn level_crossing(profile: &RateProfile, u: f64, side: Side, tol: f64) -> Result<Crossing> {
    check_tol(tol)?;
    if !u.is_finite() {
        return Err(Error::InvalidLevel(u));
    }
    if u < 0.0 {
        return Ok(Crossing::Empty);
    }
    Ok(crossing_from(profile, u, side, profile.mean(), tol))
}

// Assumes Ψ(start) ≤ u and start on the given side of the zero of Ψ.
fn crossing_from(profile: &RateProfile, u: f64, side: Side, start: f64, tol: f64) -> Crossing {
    let sign = if side == Side::Upper { 1.0 } else { -1.0 };
    let edge = if side == Side::Upper { profile.upper_edge() } else { profile.lower_edge() };
    let inside = |z: f64| profile.conjugate(z).le(u);
    let lo = start;
    let hi = match edge {
        Edge::Closed { at, value } => {
            if value.le(u) {
                return Crossing::Edge(at);
            }
            at
        }
        Edge::Open => {
            let mut d = (2.0 * start.abs()).max(1.0);
            loop {
                let z = start + sign * d;
                if !inside(z) {
                    break z;
                }
                d *= 2.0;
                if d > BRACKET_LIMIT {
                    return Crossing::Edge(sign * f64::INFINITY);
                }
            }
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Crossing::Finite(lo)
}

/// `γ(u) = sup{z ≥ 0 : Ψ(z) ≤ u}`. The returned point always satisfies
/// `Ψ(γ) ≤ u` and lies within `tol` of the exact crossing.
pub fn gamma_level(profile: &RateProfile, u: f64, tol: f64) -> Result<Crossing> {
    check_tol(tol)?;
    if !u.is_finite() {
        return Err(Error::InvalidLevel(u));
    }
    if u < 0.0 {
        return Ok(Crossing::Empty);
    }
    let start = profile.mean().max(0.0);
    if !profile.conjugate(start).le(u) {
        return Ok(Crossing::Empty);
    }
    Ok(crossing_from(profile, u, Side::Upper, start, tol))
}

/// `c₀` with `1/c₀ = sup{Ψ(a) : Ψ(a) < ∞}`; zero when `Ψ` is unbounded on
/// its domain.
pub fn critical_c(profile: &RateProfile) -> f64 {
    let mut sup = 0.0f64;
    for edge in [profile.lower_edge(), profile.upper_edge()] {
        match edge {
            Edge::Open | Edge::Closed { value: ExtReal::PosInf, .. } => return 0.0,
            Edge::Closed { value: ExtReal::Finite(v), .. } => sup = sup.max(v),
        }
    }
    if sup > 0.0 {
        1.0 / sup
    } else {
        f64::INFINITY
    }
}
