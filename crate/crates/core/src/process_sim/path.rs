use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::spec::{LevySpec, Process};
use crate::error::{Error, Result};

/// Default number of jumps a single path may carry.
pub const DEFAULT_JUMP_CAP: u64 = 10_000_000;
/// Default number of grid nodes a single path may carry.
pub const DEFAULT_GRID_CAP: u64 = 200_000_000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a run with the given master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Caps on what one simulation may allocate.
#[derive(Debug, Clone, Copy)]
pub struct SimLimits {
    pub max_jumps: u64,
    pub max_grid_nodes: u64,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits { max_jumps: DEFAULT_JUMP_CAP, max_grid_nodes: DEFAULT_GRID_CAP }
    }
}

/// One simulated trajectory on `[0, T]`.
///
/// The path is `(grid(t) + jumps(t) + base_drift·t) + shift·t`, where `grid`
/// is the linearly interpolated continuous part (empty for pure-jump laws)
/// and `jumps` is the right-continuous sum of jumps up to `t`.
#[derive(Debug, Clone)]
pub struct SamplePath {
    horizon: f64,
    step: f64,
    grid: Vec<f64>,
    jump_times: Vec<f64>,
    jump_sizes: Vec<f64>,
    cum_jumps: Vec<f64>,
    base_drift: f64,
    shift: f64,
    polygonal: bool,
    pure_jump: bool,
}

/// Simulate `spec` on `[0, horizon]` with `m_path` grid cells.
pub fn simulate_path(spec: &LevySpec, horizon: f64, m_path: usize, seed: u64) -> Result<SamplePath> {
    simulate_path_with_limits(spec, horizon, m_path, seed, SimLimits::default())
}

pub fn simulate_path_with_limits(
    spec: &LevySpec,
    horizon: f64,
    m_path: usize,
    seed: u64,
    limits: SimLimits,
) -> Result<SamplePath> {
    spec.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::OutOfRange(format!("horizon {horizon} must be positive and finite")));
    }
    if m_path < 2 {
        return Err(Error::OutOfRange(format!("path resolution {m_path} must be at least 2")));
    }
    if m_path as u64 + 1 > limits.max_grid_nodes {
        return Err(Error::ResourceLimit { what: "grid nodes", cap: limits.max_grid_nodes });
    }
    let step = horizon / m_path as f64;
    // Separate streams keep the continuous part and the jumps independent of
    // each other's draw counts, so a longer horizon extends a shorter one.
    let mut grid_rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x6772_6964));
    let mut jump_rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x6A75_6D70));

    let mut grid = Vec::new();
    let mut jump_times = Vec::new();
    let mut jump_sizes = Vec::new();
    let mut base_drift = 0.0;
    let mut polygonal = false;

    match &spec.process {
        Process::BrownianDrift { sigma, drift } => {
            base_drift = -drift;
            if *sigma > 0.0 {
                let sd = sigma * step.sqrt();
                grid.reserve(m_path + 1);
                let mut w = 0.0;
                grid.push(0.0);
                for _ in 0..m_path {
                    let z: f64 = StandardNormal.sample(&mut grid_rng);
                    w += sd * z;
                    grid.push(w);
                }
            }
        }
        Process::CenteredPoisson { rate } => {
            base_drift = -rate;
            poisson_jumps(*rate, horizon, limits.max_jumps, &mut jump_rng, |_| 1.0, &mut jump_times, &mut jump_sizes)?;
        }
        Process::CompoundPoisson { rate, jump } => {
            poisson_jumps(*rate, horizon, limits.max_jumps, &mut jump_rng, |r| jump.sample(r), &mut jump_times, &mut jump_sizes)?;
        }
        Process::GammaSubordinator { shape, scale } => {
            let g = Gamma::new(shape * step, *scale)
                .map_err(|e| Error::InvalidSpec(format!("gamma increment law: {e}")))?;
            grid.reserve(m_path + 1);
            let mut acc = 0.0;
            grid.push(0.0);
            for _ in 0..m_path {
                acc += g.sample(&mut grid_rng);
                grid.push(acc);
            }
        }
        Process::PartialSum { step: law } => {
            let n = horizon.floor() as u64;
            if n > limits.max_jumps {
                return Err(Error::ResourceLimit { what: "partial-sum steps", cap: limits.max_jumps });
            }
            polygonal = true;
            jump_times = (1..=n).map(|i| i as f64).collect();
            jump_sizes = (0..n).map(|_| law.sample(&mut jump_rng)).collect();
        }
    }

    let mut cum_jumps = Vec::with_capacity(jump_sizes.len() + 1);
    let mut acc = 0.0;
    cum_jumps.push(0.0);
    for &j in &jump_sizes {
        acc += j;
        cum_jumps.push(acc);
    }

    Ok(SamplePath {
        horizon,
        step,
        grid,
        jump_times,
        jump_sizes,
        cum_jumps,
        base_drift,
        shift: spec.shift,
        polygonal,
        pure_jump: matches!(
            spec.process,
            Process::CenteredPoisson { .. } | Process::CompoundPoisson { .. } | Process::PartialSum { .. }
        ),
    })
}

// Times and sizes are drawn alternately so that the jumps on [0, T] do not
// depend on T.
fn poisson_jumps(
    rate: f64,
    horizon: f64,
    cap: u64,
    rng: &mut ChaCha8Rng,
    mut size: impl FnMut(&mut ChaCha8Rng) -> f64,
    times: &mut Vec<f64>,
    sizes: &mut Vec<f64>,
) -> Result<()> {
    // Refuse up front when the expected count alone is past the cap.
    if rate * horizon > cap as f64 {
        return Err(Error::ResourceLimit { what: "jumps", cap });
    }
    let mut t = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        t += e / rate;
        if t > horizon {
            return Ok(());
        }
        if times.len() as u64 >= cap {
            return Err(Error::ResourceLimit { what: "jumps", cap });
        }
        times.push(t);
        sizes.push(size(rng));
    }
}

impl SamplePath {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Spacing of the grid carrying the continuous part.
    pub fn grid_step(&self) -> f64 {
        self.step
    }

    pub fn grid_cells(&self) -> usize {
        ((self.horizon / self.step).round()) as usize
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_sizes(&self) -> &[f64] {
        &self.jump_sizes
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// True for partial-sum paths, which also carry a polygonal version.
    pub fn is_partial_sum(&self) -> bool {
        self.polygonal
    }

    /// True when the law moves only by jumps, so increment functions are
    /// step functions.
    pub fn is_pure_jump(&self) -> bool {
        self.pure_jump
    }

    fn grid_at(&self, t: f64) -> f64 {
        if self.grid.is_empty() {
            return 0.0;
        }
        let x = t / self.step;
        let last = self.grid.len() - 1;
        if x <= 0.0 {
            return self.grid[0];
        }
        let i = (x.floor() as usize).min(last - 1);
        let frac = (x - i as f64).min(1.0);
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        a + frac * (b - a)
    }

    fn jumps_through(&self, t: f64) -> f64 {
        let k = self.jump_times.partition_point(|&s| s <= t);
        self.cum_jumps[k]
    }

    /// Path value `Z(t)`, right-continuous at jumps.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        (self.grid_at(t) + self.jumps_through(t) + self.base_drift * t) + self.shift * t
    }

    /// Linear interpolation of the partial sums between integer times; for
    /// other laws this is the ordinary path value.
    pub fn polygonal_value(&self, t: f64) -> f64 {
        if !self.polygonal {
            return self.value(t);
        }
        let t = t.clamp(0.0, self.horizon);
        let k = t.floor();
        let n = self.jump_times.len();
        let ki = (k as usize).min(n);
        let frac = t - k;
        let lo = self.cum_jumps[ki];
        let walk = if ki < n { lo + frac * (self.cum_jumps[ki + 1] - lo) } else { lo };
        walk + self.shift * t
    }

    /// The same path restricted to `[0, t]`; values on `[0, t]` are unchanged.
    pub fn truncate(&self, t: f64) -> Result<SamplePath> {
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::OutOfRange(format!("cannot truncate a path on [0, {}] at {t}", self.horizon)));
        }
        let grid = if self.grid.is_empty() {
            Vec::new()
        } else {
            let cells = ((t / self.step) - 1e-9).ceil().max(1.0) as usize;
            self.grid[..=cells.min(self.grid.len() - 1)].to_vec()
        };
        let k = self.jump_times.partition_point(|&s| s <= t);
        Ok(SamplePath {
            horizon: t,
            step: self.step,
            grid,
            jump_times: self.jump_times[..k].to_vec(),
            jump_sizes: self.jump_sizes[..k].to_vec(),
            cum_jumps: self.cum_jumps[..=k].to_vec(),
            ..*self
        })
    }

    /// Path values at the grid nodes merged with the jump times.
    pub fn rows(&self) -> Vec<(f64, f64)> {
        let cells = self.grid_cells();
        let mut times: Vec<f64> = (0..=cells).map(|i| i as f64 * self.step).collect();
        times.extend_from_slice(&self.jump_times);
        times.sort_by(f64::total_cmp);
        times.dedup();
        times.into_iter().map(|t| (t, self.value(t))).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in self.rows() {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }

    /// Binary layout: the 8-byte magic `ERFLPATH`, a little-endian `u64`
    /// row count, then `(t, value)` pairs as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let rows = self.rows();
        w.write_all(PATH_MAGIC)?;
        w.write_all(&(rows.len() as u64).to_le_bytes())?;
        for (t, v) in rows {
            w.write_all(&t.to_le_bytes())?;
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

pub const PATH_MAGIC: &[u8; 8] = b"ERFLPATH";

/// Read rows written by [`SamplePath::write_binary`].
pub fn read_binary_rows<R: Read>(mut r: R) -> Result<Vec<(f64, f64)>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != PATH_MAGIC {
        return Err(Error::InvalidFunction("not an ERFLPATH file".into()));
    }
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let n = u64::from_le_bytes(buf) as usize;
    let mut rows = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        let t = f64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        rows.push((t, f64::from_le_bytes(buf)));
    }
    Ok(rows)
}

/// Read rows written by [`SamplePath::write_csv`].
pub fn read_csv_rows<R: Read>(mut r: R) -> Result<Vec<(f64, f64)>> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let parse = |s: Option<&str>| {
            s.and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidFunction(format!("bad path row {}: {line}", n + 1)))
        };
        let mut it = line.split(',');
        rows.push((parse(it.next())?, parse(it.next())?));
    }
    Ok(rows)
}
