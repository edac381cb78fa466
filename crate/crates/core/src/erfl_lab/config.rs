use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_space::Metric;
use crate::process_sim::{Flavor, LevySpec};

/// What a sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// The scalar maximal-increment statistic against `γ(1/c)`.
    ErMax,
    /// Unit-rate ensembles against `{I ≤ 1/c}` in the uniform metric.
    Uniform,
    /// Integer-started ensembles against `{J ≤ 1/c}` in the Högnäs metric.
    Weak,
    /// Strassen-normalized ensembles with power-law windows against `{I_W ≤ 1}`.
    Strassen,
    /// Partial-sum ensembles against `{I ≤ 1/c}` or `D_c`.
    PartialSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    #[serde(default = "default_net_eps")]
    pub eps: f64,
    #[serde(default = "default_net_budget")]
    pub budget: usize,
}

fn default_net_eps() -> f64 {
    0.05
}
fn default_net_budget() -> usize {
    500
}
fn default_replicates() -> usize {
    20
}
fn default_m() -> usize {
    64
}
fn default_stride() -> f64 {
    1.0
}
fn default_path_resolution() -> usize {
    16
}
fn default_tolerance() -> f64 {
    1e-3
}
fn default_max_iter() -> usize {
    10_000
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig { eps: default_net_eps(), budget: default_net_budget() }
    }
}

/// A sweep over horizons and replicates, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: SweepKind,
    pub process: LevySpec,
    /// Window constant in `a_T = c log T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Exponent `p` in `a_T = T^p` for Strassen sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_exponent: Option<f64>,
    pub horizons: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_stride")]
    pub stride: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default)]
    pub seed: u64,
    /// Grid cells per unit time for the continuous part of paths.
    #[serde(default = "default_path_resolution")]
    pub path_resolution: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bv_bound: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config { field: if path == "." { "<root>".into() } else { path }, message: e.inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| field_err("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.process.validate().map_err(|e| field_err("process", e.to_string()))?;
        if self.horizons.is_empty() {
            return Err(field_err("horizons", "at least one horizon is required"));
        }
        for (i, &t) in self.horizons.iter().enumerate() {
            if !(t > std::f64::consts::E && t.is_finite()) {
                return Err(field_err(&format!("horizons[{i}]"), format!("{t} must exceed e")));
            }
        }
        if self.replicates == 0 {
            return Err(field_err("replicates", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(field_err("m", "must be at least 1"));
        }
        if !(self.stride > 0.0 && self.stride.is_finite()) {
            return Err(field_err("stride", "must be positive"));
        }
        if self.path_resolution < 1 {
            return Err(field_err("path_resolution", "must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(field_err("tolerance", "must be positive"));
        }
        if !(self.net.eps > 0.0 && self.net.eps.is_finite()) {
            return Err(field_err("net.eps", "must be positive"));
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(field_err("c", "must be positive"));
            }
        }
        if let Some(m) = self.bv_bound {
            if !(m > 0.0 && m.is_finite()) {
                return Err(field_err("bv_bound", "must be positive"));
            }
        }
        match self.kind {
            SweepKind::ErMax | SweepKind::Uniform | SweepKind::PartialSum if self.c.is_none() => {
                return Err(field_err("c", "required for this sweep kind"));
            }
            SweepKind::Strassen => {
                let p = self.window_exponent.unwrap_or(0.6);
                if !(p > 0.0 && p < 1.0) {
                    return Err(field_err("window_exponent", "must lie in (0, 1)"));
                }
                if self.process.mean() != 0.0 || (self.process.variance() - 1.0).abs() > 1e-12 {
                    return Err(field_err("process", "Strassen sweeps need mean 0 and unit variance"));
                }
            }
            SweepKind::PartialSum if !self.process.is_partial_sum() => {
                return Err(field_err("process", "partial_sum sweeps need a partial_sum process"));
            }
            _ => {}
        }
        if self.metric == Some(Metric::Skorokhod) && self.kind != SweepKind::ErMax {
            return Err(field_err("metric", "level-set distances support uniform or hognas"));
        }
        if let Some(fl) = self.flavor {
            let ok = match self.kind {
                SweepKind::PartialSum => matches!(fl, Flavor::M | Flavor::L | Flavor::Q | Flavor::F),
                SweepKind::Uniform => matches!(fl, Flavor::G | Flavor::H | Flavor::L | Flavor::Q),
                SweepKind::Weak => matches!(fl, Flavor::G | Flavor::L | Flavor::Q),
                _ => false,
            };
            if !ok {
                return Err(field_err("flavor", format!("{fl:?} does not fit a {:?} sweep", self.kind)));
            }
        }
        Ok(())
    }

    pub fn metric_or_default(&self) -> Metric {
        self.metric.unwrap_or(match self.kind {
            SweepKind::Weak => Metric::Hognas,
            SweepKind::PartialSum if self.flavor == Some(Flavor::F) => Metric::Hognas,
            _ => Metric::Uniform,
        })
    }

    pub fn flavor_or_default(&self) -> Flavor {
        self.flavor.unwrap_or(match self.kind {
            SweepKind::Weak => Flavor::L,
            SweepKind::PartialSum => Flavor::M,
            SweepKind::Strassen => Flavor::H,
            _ => Flavor::G,
        })
    }
}
