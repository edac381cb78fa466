use serde::{Deserialize, Serialize};

use super::functionals::{rate_i, rate_j, rate_of_values};
use crate::error::{Error, Result};
use crate::path_space::{BvRep, GridFunction};
use crate::transforms::{ExtReal, RateProfile};

/// Topology a level set is considered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// `{I ≤ α}` under the uniform metric.
    Uniform,
    /// `{J ≤ α}` inside `BV_{0,M}` under the Högnäs metric.
    Weak,
}

/// A sublevel set of a rate functional.
#[derive(Debug, Clone)]
pub struct LevelSet {
    profile: RateProfile,
    level: f64,
    topology: Topology,
    bv_bound: Option<f64>,
}

/// Bound `M` on the total variation of members of `{J ≤ α}`.
///
/// Takes the larger of `20α(1/|t₁| + 1/t₀)` and ten times a Young-inequality
/// bound: `|s| ≤ (Ψ(s) + max Λ(±τ))/τ` bounds the absolutely continuous
/// part, and `α / min(t₀, |t₁|)` bounds the singular part.
pub fn default_bv_bound(profile: &RateProfile, level: f64) -> f64 {
    let (t1, t0) = profile.domain();
    let inv = |t: f64| if t.is_finite() { 1.0 / t.abs() } else { 0.0 };
    let heuristic = 20.0 * level * (inv(t1) + inv(t0));
    let tau = 1.0f64.min(0.5 * t0).min(0.5 * t1.abs());
    let lam = profile.cumulant(tau).to_f64().max(profile.cumulant(-tau).to_f64());
    let young = (level + lam) / tau + level * inv(t1).max(inv(t0));
    heuristic.max(10.0 * young)
}

impl LevelSet {
    pub fn new(profile: RateProfile, level: f64, topology: Topology, bv_bound: Option<f64>) -> Result<Self> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::InvalidLevel(level));
        }
        let bv_bound = match topology {
            Topology::Uniform => None,
            Topology::Weak => Some(match bv_bound {
                Some(m) if m > 0.0 && m.is_finite() => m,
                Some(m) => return Err(Error::OutOfRange(format!("BV bound {m} must be positive"))),
                None => default_bv_bound(&profile, level),
            }),
        };
        Ok(LevelSet { profile, level, topology, bv_bound })
    }

    pub fn uniform(profile: RateProfile, level: f64) -> Result<Self> {
        LevelSet::new(profile, level, Topology::Uniform, None)
    }

    pub fn weak(profile: RateProfile, level: f64) -> Result<Self> {
        LevelSet::new(profile, level, Topology::Weak, None)
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn bv_bound(&self) -> Option<f64> {
        self.bv_bound
    }

    /// The same set for the profile shifted by `μ`, i.e. the set translated
    /// by `s ↦ μs`.
    pub fn shifted(&self, mu: f64) -> Self {
        LevelSet { profile: self.profile.shifted(mu), ..self.clone() }
    }

    /// `I(f)` or `J(f)` according to the topology.
    pub fn rate(&self, f: &GridFunction) -> ExtReal {
        match self.topology {
            Topology::Uniform => rate_i(f, &self.profile),
            Topology::Weak => rate_j(&BvRep::from_grid(f), &self.profile),
        }
    }

    pub fn contains(&self, f: &GridFunction) -> bool {
        self.rate(f).le(self.level + 1e-9)
    }

    /// `Σ h Ψ(slope)` of the piecewise-linear interpolation of node values.
    pub(crate) fn polygon_rate(&self, values: &[f64]) -> f64 {
        rate_of_values(values, &self.profile)
    }

    /// Maximizer over the set of `Σ_j c_j s_j / m`, where `s_j` are cell
    /// slopes. The maximizer has `s_j = Λ'(τ c_j)` with `τ ≥ 0` chosen so
    /// that the rate equals the level, up to a relative `1e-12`.
    /// `tau` carries the multiplier between calls as a starting guess.
    pub(crate) fn extreme_slopes(&self, c: &[f64], out: &mut Vec<f64>, tau: &mut f64) {
        let p = &self.profile;
        let m = c.len() as f64;
        out.clear();
        let cmax = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if cmax == 0.0 {
            out.resize(c.len(), p.mean());
            return;
        }
        let (t1, t0) = p.domain();
        let mut tau_max = f64::INFINITY;
        for &cj in c {
            if cj > 0.0 {
                tau_max = tau_max.min(t0 / cj);
            } else if cj < 0.0 {
                tau_max = tau_max.min(t1 / cj);
            }
        }
        // φ(τ) = mean of R(τc_j) minus the level, and φ'(τ).
        let phi_d = |tau: f64| -> (f64, f64) {
            let (mut r, mut d) = (0.0, 0.0);
            for &cj in c {
                let (rj, d2) = p.tilt(tau * cj);
                r += rj;
                d += cj * cj * d2;
            }
            let v = r / m - self.level;
            (if v.is_nan() { f64::INFINITY } else { v }, tau * d / m)
        };
        let phi = |tau: f64| phi_d(tau).0;
        // Bracket the root of φ on [0, τ_max), starting from the previous
        // multiplier when it is usable.
        let guess = if *tau > 0.0 && *tau < tau_max { *tau } else { (1.0 / cmax).min(0.5 * tau_max) };
        let mut lo = 0.0f64;
        let mut hi = guess;
        let mut start = guess;
        let mut bracketed = false;
        for _ in 0..2000 {
            if phi(hi) >= 0.0 {
                bracketed = true;
                break;
            }
            lo = hi;
            start = hi;
            let next = if tau_max.is_finite() { 0.5 * (hi + tau_max) } else { 2.0 * hi };
            if next == hi || next > 1e300 {
                break;
            }
            hi = next;
        }
        let root = if !bracketed {
            lo
        } else {
            let mut t = start;
            let accept = 1e-12 * self.level.max(1.0);
            let mut root = lo;
            for _ in 0..200 {
                let (v, d) = phi_d(t);
                if v.abs() <= accept {
                    root = t;
                    break;
                }
                if v < 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
                root = lo;
                let mut next = if d > 0.0 && v.is_finite() { t - v / d } else { f64::NAN };
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if hi - lo <= 1e-15 * hi || next == t {
                    break;
                }
                t = next;
            }
            root
        };
        *tau = root;
        let tau = root;
        out.extend(c.iter().map(|&cj| p.tilted_mean(tau * cj)));
    }
}
