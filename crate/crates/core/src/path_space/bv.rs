use serde::{Deserialize, Serialize};

use super::grid::{GridFunction, Interpretation};
use crate::error::{Error, Result};

/// Total variation over the nodes, `Σ |v_{i+1} − v_i|`.
pub fn total_variation(f: &GridFunction) -> f64 {
    f.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `sup{|f(s) − f(t)| : |s − t| ≤ δ}` over node pairs.
pub fn modulus_of_continuity(f: &GridFunction, delta: f64) -> f64 {
    let v = f.values();
    let m = f.resolution();
    let k = ((delta.max(0.0) * m as f64) + 1e-9).floor() as usize;
    let mut best = 0.0f64;
    for i in 0..=m {
        for j in (i + 1)..=(i + k).min(m) {
            best = best.max((v[j] - v[i]).abs());
        }
    }
    best
}

/// Point mass of a signed measure on `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// A function of bounded variation with `f(0) = 0`, written as the
/// distribution function of `ρ ds + Σ mass·δ_at`.
///
/// `densities[i]` is the constant density on the cell `[i/m, (i+1)/m)`.
/// There is no Cantor part: grid data cannot carry one.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BvRep {
    pub densities: Vec<f64>,
    pub atoms: Vec<Atom>,
}

impl BvRep {
    /// Read off the representation of a grid function: slopes for a
    /// piecewise-linear function, jumps at the nodes for a step function.
    pub fn from_grid(f: &GridFunction) -> Self {
        match f.interpretation() {
            Interpretation::PiecewiseLinear => BvRep { densities: f.slopes(), atoms: Vec::new() },
            Interpretation::CadlagStep => {
                let m = f.resolution();
                let atoms = f
                    .values()
                    .windows(2)
                    .enumerate()
                    .filter(|(_, w)| w[1] != w[0])
                    .map(|(i, w)| Atom { at: (i + 1) as f64 / m as f64, mass: w[1] - w[0] })
                    .collect();
                BvRep { densities: vec![0.0; m], atoms }
            }
        }
    }

    pub fn resolution(&self) -> usize {
        self.densities.len()
    }

    /// `f(s) = ∫_0^s ρ + Σ_{at ≤ s} mass`.
    pub fn eval(&self, s: f64) -> f64 {
        let m = self.densities.len();
        let mut acc = 0.0;
        if m > 0 {
            let x = s.clamp(0.0, 1.0) * m as f64;
            let full = (x.floor() as usize).min(m);
            let h = 1.0 / m as f64;
            acc += self.densities[..full].iter().sum::<f64>() * h;
            if full < m {
                acc += self.densities[full] * (x - full as f64) * h;
            }
        }
        acc + self.atoms.iter().filter(|a| a.at <= s).map(|a| a.mass).sum::<f64>()
    }

    pub fn total_variation(&self) -> f64 {
        let m = self.densities.len().max(1) as f64;
        self.densities.iter().map(|d| d.abs()).sum::<f64>() / m
            + self.atoms.iter().map(|a| a.mass.abs()).sum::<f64>()
    }

    /// Positive part of the Hahn–Jordan decomposition.
    pub fn positive_part(&self) -> BvRep {
        BvRep {
            densities: self.densities.iter().map(|d| d.max(0.0)).collect(),
            atoms: self.atoms.iter().filter(|a| a.mass > 0.0).copied().collect(),
        }
    }

    /// Negative part, as a non-negative measure.
    pub fn negative_part(&self) -> BvRep {
        BvRep {
            densities: self.densities.iter().map(|d| (-d).max(0.0)).collect(),
            atoms: self
                .atoms
                .iter()
                .filter(|a| a.mass < 0.0)
                .map(|a| Atom { at: a.at, mass: -a.mass })
                .collect(),
        }
    }

    /// Total mass of the positive and negative singular parts.
    pub fn singular_masses(&self) -> (f64, f64) {
        let pos = self.atoms.iter().filter(|a| a.mass > 0.0).map(|a| a.mass).sum();
        let neg = self.atoms.iter().filter(|a| a.mass < 0.0).map(|a| -a.mass).sum();
        (pos, neg)
    }

    /// Sample at the nodes `i/m` of a grid.
    pub fn to_grid(&self, m: usize, interp: Interpretation) -> GridFunction {
        let values = (0..=m)
            .map(|i| if i == 0 { 0.0 } else { self.eval(i as f64 / m as f64) })
            .collect();
        GridFunction::new_unchecked(values, interp)
    }
}

/// A finite partition `0 = t_0 < … < t_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    knots: Vec<f64>,
}

impl Partition {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(Error::InvalidPartition("knots must run from 0 to 1".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPartition("knots must be strictly increasing".into()));
        }
        Ok(Partition { knots })
    }

    /// Knots `j/k`.
    pub fn uniform(k: usize) -> Self {
        let k = k.max(1);
        let mut knots: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
        knots[k] = 1.0;
        Partition { knots }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn cells(&self) -> usize {
        self.knots.len() - 1
    }

    /// Mesh `d(P) = max (t_j − t_{j−1})`.
    pub fn mesh(&self) -> f64 {
        self.knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Whether every knot of `self` is a knot of `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        self.knots.iter().all(|k| finer.knots.iter().any(|x| (x - k).abs() < 1e-12))
    }
}

/// The piecewise-linear lift `f^P = f₊^P − f₋^P`: each of the positive and
/// negative variation functions is interpolated linearly between the knots
/// of `P`. The result is sampled on the grid of `f`.
pub fn partition_lift(f: &GridFunction, p: &Partition) -> GridFunction {
    let m = f.resolution();
    let v = f.values();
    // Positive and negative variation functions at the nodes.
    let mut pos = vec![0.0; m + 1];
    let mut neg = vec![0.0; m + 1];
    for i in 1..=m {
        let d = v[i] - v[i - 1];
        pos[i] = pos[i - 1] + d.max(0.0);
        neg[i] = neg[i - 1] + (-d).max(0.0);
    }
    let sample = |arr: &[f64], s: f64| -> f64 {
        let x = s * m as f64;
        let i = (x.floor() as usize).min(m);
        match f.interpretation() {
            Interpretation::CadlagStep => arr[i],
            Interpretation::PiecewiseLinear => {
                if i == m {
                    arr[m]
                } else {
                    arr[i] + (x - i as f64) * (arr[i + 1] - arr[i])
                }
            }
        }
    };
    let knots = p.knots();
    let at_knots: Vec<(f64, f64)> = knots.iter().map(|&t| (sample(&pos, t), sample(&neg, t))).collect();
    let mut out = Vec::with_capacity(m + 1);
    let mut k = 1;
    for i in 0..=m {
        let s = i as f64 / m as f64;
        while k < knots.len() - 1 && s > knots[k] {
            k += 1;
        }
        let (t0, t1) = (knots[k - 1], knots[k]);
        let lam = ((s - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (p0, n0) = at_knots[k - 1];
        let (p1, n1) = at_knots[k];
        let plus = p0 + lam * (p1 - p0);
        let minus = n0 + lam * (n1 - n0);
        out.push(if i == 0 { 0.0 } else { plus - minus });
    }
    GridFunction::new_unchecked(out, Interpretation::PiecewiseLinear)
}
