//! Cumulants, their Legendre conjugates and the level inverses derived from
//! them.

mod law;
mod legendre;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::process_sim::LevySpec;

pub use law::Edge;
use law::Law;
pub use legendre::{
    critical_c, gamma_level, legendre, level_crossing, Crossing, Side, DEFAULT_TOL,
};

/// A value in `ℝ ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInf => None,
        }
    }

    /// Lossy conversion for output and plotting.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn le(self, x: f64) -> bool {
        matches!(self, ExtReal::Finite(v) if v <= x)
    }

    pub fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }

    pub fn scale(self, k: f64) -> ExtReal {
        debug_assert!(k >= 0.0);
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(k * a),
            ExtReal::PosInf if k == 0.0 => ExtReal::Finite(0.0),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

/// Which structural hypotheses the law satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    /// The cumulant is finite on all of ℝ.
    pub full_domain: bool,
    /// No Gaussian component.
    pub no_gaussian: bool,
    /// The mean function is linear in time.
    pub linear_mean: bool,
}

/// Cumulant `Λ(t) = log E e^{tZ(1)}` of a (possibly shifted) law together
/// with its conjugate `Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    law: Law,
    shift: f64,
    mean: f64,
    conditions: Conditions,
}

impl RateProfile {
    pub fn new(spec: &LevySpec) -> Result<Self> {
        spec.validate()?;
        let law = Law::from_process(&spec.process);
        let (t1, t0) = law.domain();
        Ok(RateProfile {
            shift: spec.shift,
            mean: spec.mean(),
            conditions: Conditions {
                full_domain: t1 == f64::NEG_INFINITY && t0 == f64::INFINITY,
                no_gaussian: !spec.has_gaussian_component(),
                linear_mean: spec.has_linear_mean(),
            },
            law,
        })
    }

    /// Same law with the extra linear drift `μ`.
    pub fn shifted(&self, mu: f64) -> Self {
        let mut p = self.clone();
        p.shift += mu;
        p.mean += mu;
        p
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `Λ'(0)`, the unique zero of `Ψ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn conditions(&self) -> Conditions {
        self.conditions
    }

    /// `(t₁, t₀)`, the interior of the domain of `Λ`.
    pub fn domain(&self) -> (f64, f64) {
        self.law.domain()
    }

    pub fn cumulant(&self, t: f64) -> ExtReal {
        let v = self.law.value(t);
        if v.is_finite() {
            ExtReal::Finite(v + self.shift * t)
        } else {
            ExtReal::PosInf
        }
    }

    /// Raw `Λ(t)`; `+∞` outside the domain. For inner loops.
    pub(crate) fn cumulant_raw(&self, t: f64) -> f64 {
        self.law.value(t) + self.shift * t
    }

    pub fn cumulant_d1(&self, t: f64) -> f64 {
        self.law.d1(t) + self.shift
    }

    pub fn cumulant_d2(&self, t: f64) -> f64 {
        self.law.d2(t)
    }

    pub fn lower_edge(&self) -> Edge {
        shift_edge(self.law.lower_edge(), self.shift)
    }

    pub fn upper_edge(&self) -> Edge {
        shift_edge(self.law.upper_edge(), self.shift)
    }

    pub fn has_closed_conjugate(&self) -> bool {
        self.law.conjugate_closed(0.0).is_some()
    }

    /// `Ψ(a)`, in closed form when available and numerically otherwise.
    pub fn conjugate(&self, a: f64) -> ExtReal {
        match self.law.conjugate_closed(a - self.shift) {
            Some(v) => v,
            None => legendre::legendre_unchecked(self, a, DEFAULT_TOL * 1e-3),
        }
    }

    /// `Ψ(a)` as a float, `+∞` when infinite. For inner loops.
    pub(crate) fn conjugate_raw(&self, a: f64) -> f64 {
        self.conjugate(a).to_f64()
    }

    /// `Ψ'(a)` for `a` inside the range of `Λ'`, i.e. the tilt solving `Λ'(t) = a`.
    pub fn conjugate_slope(&self, a: f64) -> Option<f64> {
        legendre::solve_tilt(self, a, 1e-13)
    }

    /// `(tΛ'(t) − Λ(t), Λ''(t))` in one evaluation.
    pub(crate) fn tilt(&self, t: f64) -> (f64, f64) {
        self.law.tilt(t)
    }

    /// `Λ'(t)` clamped to the limit at infinite arguments.
    pub(crate) fn tilted_mean(&self, t: f64) -> f64 {
        self.cumulant_d1(t)
    }
}

fn shift_edge(e: Edge, mu: f64) -> Edge {
    match e {
        Edge::Open => Edge::Open,
        Edge::Closed { at, value } => Edge::Closed { at: at + mu, value },
    }
}

/// `Λ(t)` for the law described by `spec`.
pub fn cumulant(spec: &LevySpec, t: f64) -> Result<ExtReal> {
    Ok(RateProfile::new(spec)?.cumulant(t))
}

/// `Ψ(a)` for the law described by `spec`, using the closed form when known.
pub fn conjugate(spec: &LevySpec, a: f64) -> Result<ExtReal> {
    Ok(RateProfile::new(spec)?.conjugate(a))
}
