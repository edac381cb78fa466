use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How node values extend to the whole of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// Right-continuous step function, constant on `[i/m, (i+1)/m)`.
    CadlagStep,
    /// Linear interpolation between nodes.
    PiecewiseLinear,
}

/// A function on `[0, 1]` given by its values at `i/m`, `i = 0..=m`, with
/// `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
    interp: Interpretation,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, interp: Interpretation) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidFunction("need at least two nodes".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidFunction(format!("value at 0 is {}, expected 0", values[0])));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("non-finite value at node {i}")));
        }
        Ok(GridFunction { values, interp })
    }

    /// For callers that construct values with `values[0] == 0` by design.
    pub(crate) fn new_unchecked(values: Vec<f64>, interp: Interpretation) -> Self {
        debug_assert!(values.len() >= 2 && values[0] == 0.0);
        GridFunction { values, interp }
    }

    pub fn zero(m: usize, interp: Interpretation) -> Self {
        GridFunction::new_unchecked(vec![0.0; m.max(1) + 1], interp)
    }

    /// Sample `f` at the `m + 1` nodes; `f(0)` is forced to zero.
    pub fn from_fn(m: usize, interp: Interpretation, f: impl Fn(f64) -> f64) -> Result<Self> {
        let m = m.max(1);
        let mut values: Vec<f64> = (0..=m).map(|i| f(i as f64 / m as f64)).collect();
        values[0] = 0.0;
        GridFunction::new(values, interp)
    }

    /// Piecewise-linear function with the given per-cell slopes.
    pub fn from_slopes(slopes: &[f64]) -> Self {
        let m = slopes.len().max(1);
        let h = 1.0 / m as f64;
        let mut values = Vec::with_capacity(m + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for &s in slopes {
            acc += s * h;
            values.push(acc);
        }
        if slopes.is_empty() {
            values.push(0.0);
        }
        GridFunction::new_unchecked(values, Interpretation::PiecewiseLinear)
    }

    /// The line `s ↦ slope·s`.
    pub fn linear(m: usize, slope: f64) -> Self {
        GridFunction::from_slopes(&vec![slope; m.max(1)])
    }

    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interp
    }

    pub fn with_interpretation(mut self, interp: Interpretation) -> Self {
        self.interp = interp;
        self
    }

    pub fn endpoint(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    /// Per-cell slopes `m(v_{i+1} − v_i)`.
    pub fn slopes(&self) -> Vec<f64> {
        let m = self.resolution() as f64;
        self.values.windows(2).map(|w| m * (w[1] - w[0])).collect()
    }

    pub fn eval(&self, s: f64) -> f64 {
        let m = self.resolution();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let i = (x.floor() as usize).min(m);
        match self.interp {
            Interpretation::CadlagStep => self.values[i],
            Interpretation::PiecewiseLinear => {
                if i == m {
                    return self.values[m];
                }
                let frac = x - i as f64;
                self.values[i] + frac * (self.values[i + 1] - self.values[i])
            }
        }
    }

    /// Keep only the nodes of the coarser grid `k/m'`; `m'` must divide `m`.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        let n = self.resolution();
        if m == 0 || n % m != 0 {
            return Err(Error::IncompatibleGrids { left: n, right: m });
        }
        let k = n / m;
        let values = self.values.iter().step_by(k).copied().collect();
        Ok(GridFunction::new_unchecked(values, self.interp))
    }

    /// Pointwise `self + mu·s`.
    pub fn add_linear(&self, mu: f64) -> Self {
        let m = self.resolution() as f64;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v + mu * (i as f64 / m))
            .collect();
        GridFunction::new_unchecked(values, self.interp)
    }

    pub fn scaled(&self, k: f64) -> Self {
        GridFunction::new_unchecked(self.values.iter().map(|v| k * v).collect(), self.interp)
    }
}

/// Check two functions share a grid.
pub(crate) fn same_grid(f: &GridFunction, g: &GridFunction) -> Result<usize> {
    let (a, b) = (f.resolution(), g.resolution());
    if a != b {
        return Err(Error::IncompatibleGrids { left: a, right: b });
    }
    Ok(a)
}
