use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of a single jump (compound Poisson) or of a single step (partial sums).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum JumpDist {
    /// Value `up` with probability `p`, `down` otherwise.
    TwoPoint { p: f64, up: f64, down: f64 },
    Exponential { mean: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl JumpDist {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match *self {
            JumpDist::TwoPoint { p, up, down } => {
                if !(p > 0.0 && p < 1.0) {
                    return bad(format!("two_point p = {p} must lie in (0, 1)"));
                }
                if !up.is_finite() || !down.is_finite() || up == down {
                    return bad(format!("two_point values {up}, {down} must be finite and distinct"));
                }
            }
            JumpDist::Exponential { mean } => {
                if !(mean > 0.0 && mean.is_finite()) {
                    return bad(format!("exponential mean = {mean} must be positive"));
                }
            }
            JumpDist::Gaussian { mean, sd } => {
                if !mean.is_finite() || !(sd > 0.0 && sd.is_finite()) {
                    return bad(format!("gaussian needs finite mean and sd > 0, got {mean}, {sd}"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpDist::TwoPoint { p, up, down } => p * up + (1.0 - p) * down,
            JumpDist::Exponential { mean } => mean,
            JumpDist::Gaussian { mean, .. } => mean,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            JumpDist::TwoPoint { p, up, down } => p * up * up + (1.0 - p) * down * down,
            JumpDist::Exponential { mean } => 2.0 * mean * mean,
            JumpDist::Gaussian { mean, sd } => mean * mean + sd * sd,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpDist::TwoPoint { p, up, down } => {
                if rng.random::<f64>() < p {
                    up
                } else {
                    down
                }
            }
            JumpDist::Exponential { mean } => {
                let e: f64 = Exp::new(1.0).expect("unit rate").sample(rng);
                e * mean
            }
            JumpDist::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
        }
    }
}

/// The Lévy family. `drift` in `BrownianDrift` enters as `Z(t) = σW(t) − drift·t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Process {
    BrownianDrift { sigma: f64, drift: f64 },
    /// `Π(t) − rate·t` for a Poisson process of the given rate.
    CenteredPoisson { rate: f64 },
    CompoundPoisson { rate: f64, jump: JumpDist },
    GammaSubordinator { shape: f64, scale: f64 },
    /// Random walk `S(t) = X_1 + … + X_⌊t⌋`.
    PartialSum { step: JumpDist },
}

/// A process together with an optional linear shift `μ`, so the simulated
/// path is `Z(t) + μt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevySpec {
    #[serde(flatten)]
    pub process: Process,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl From<Process> for LevySpec {
    fn from(process: Process) -> Self {
        LevySpec { process, shift: 0.0 }
    }
}

impl LevySpec {
    pub fn brownian(sigma: f64) -> Self {
        Process::BrownianDrift { sigma, drift: 0.0 }.into()
    }

    pub fn centered_poisson(rate: f64) -> Self {
        Process::CenteredPoisson { rate }.into()
    }

    pub fn compound_poisson(rate: f64, jump: JumpDist) -> Self {
        Process::CompoundPoisson { rate, jump }.into()
    }

    pub fn gamma(shape: f64, scale: f64) -> Self {
        Process::GammaSubordinator { shape, scale }.into()
    }

    pub fn partial_sum(step: JumpDist) -> Self {
        Process::PartialSum { step }.into()
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: LevySpec = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !self.shift.is_finite() {
            return bad(format!("shift = {} must be finite", self.shift));
        }
        match &self.process {
            Process::BrownianDrift { sigma, drift } => {
                if !(*sigma >= 0.0 && sigma.is_finite()) || !drift.is_finite() {
                    return bad(format!("brownian_drift needs sigma >= 0 and finite drift, got {sigma}, {drift}"));
                }
            }
            Process::CenteredPoisson { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return bad(format!("centered_poisson rate = {rate} must be positive"));
                }
            }
            Process::CompoundPoisson { rate, jump } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return bad(format!("compound_poisson rate = {rate} must be positive"));
                }
                jump.validate()?;
            }
            Process::GammaSubordinator { shape, scale } => {
                if !(*shape > 0.0 && shape.is_finite() && *scale > 0.0 && scale.is_finite()) {
                    return bad(format!("gamma_subordinator needs positive shape and scale, got {shape}, {scale}"));
                }
            }
            Process::PartialSum { step } => step.validate()?,
        }
        Ok(())
    }

    /// `E Z(1)`, including the shift.
    pub fn mean(&self) -> f64 {
        self.shift
            + match &self.process {
                Process::BrownianDrift { drift, .. } => -drift,
                Process::CenteredPoisson { .. } => 0.0,
                Process::CompoundPoisson { rate, jump } => rate * jump.mean(),
                Process::GammaSubordinator { shape, scale } => shape * scale,
                Process::PartialSum { step } => step.mean(),
            }
    }

    /// `Var Z(1)`.
    pub fn variance(&self) -> f64 {
        match &self.process {
            Process::BrownianDrift { sigma, .. } => sigma * sigma,
            Process::CenteredPoisson { rate } => *rate,
            Process::CompoundPoisson { rate, jump } => rate * jump.second_moment(),
            Process::GammaSubordinator { shape, scale } => shape * scale * scale,
            Process::PartialSum { step } => step.second_moment() - step.mean().powi(2),
        }
    }

    pub fn has_gaussian_component(&self) -> bool {
        matches!(self.process, Process::BrownianDrift { sigma, .. } if sigma > 0.0)
    }

    pub fn is_partial_sum(&self) -> bool {
        matches!(self.process, Process::PartialSum { .. })
    }

    /// Whether `t ↦ E Z(t)` is linear. Only partial sums with a non-centered
    /// step fail this, because their mean is a staircase.
    pub fn has_linear_mean(&self) -> bool {
        match &self.process {
            Process::PartialSum { step } => step.mean() == 0.0,
            _ => true,
        }
    }
}
