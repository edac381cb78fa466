//! Run directories: `results.csv`, `manifest.json`, `summary.md` and SVG
//! plots under `plots/`.

mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::erfl_lab::{median, ResultRow, RunRecord, RunSummary};
use crate::error::{Error, Result};

pub use svg::{scatter_plot, Series};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.md";
pub const PLOTS_DIR: &str = "plots";

/// Bookkeeping columns that are not worth a plot.
const UNPLOTTED: &[&str] = &["unconverged", "bv_pass", "excess_lower"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: crate::erfl_lab::ExperimentConfig,
    pub summary: RunSummary,
    pub rows: usize,
    pub elapsed_secs: f64,
    pub complete: bool,
}

/// `results.csv` contents: header plus one row per measurement.
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("T,replicate,statistic,value\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.horizon, r.replicate, r.statistic, r.value);
    }
    out
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Report(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Report(format!("{}:{}: malformed row `{line}`", path.display(), n + 1));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(bad());
        }
        rows.push(ResultRow {
            horizon: cols[0].parse().map_err(|_| bad())?,
            replicate: cols[1].parse().map_err(|_| bad())?,
            statistic: cols[2].to_string(),
            value: cols[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

pub fn read_manifest(dir: &Path) -> Result<Option<Manifest>> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    Ok(Some(serde_json::from_str(&text)?))
}

/// Fail if `dir` already holds a completed run and `force` is not set.
pub fn check_overwrite(dir: &Path, force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    match read_manifest(dir) {
        Ok(Some(m)) if m.complete => Err(Error::RunExists(dir.display().to_string())),
        _ => Ok(()),
    }
}

/// Persist a run: results, plots, summary, and finally the manifest.
pub fn write_run(dir: &Path, record: &RunRecord, force: bool) -> Result<PathBuf> {
    check_overwrite(dir, force)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RESULTS_FILE), results_csv(&record.rows))?;
    let mut manifest = Manifest {
        version: record.version.clone(),
        config: record.config.clone(),
        summary: record.summary.clone(),
        rows: record.rows.len(),
        elapsed_secs: record.elapsed_secs,
        complete: false,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    if !record.rows.is_empty() {
        emit_report(dir)?;
    }
    manifest.complete = true;
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(dir.to_path_buf())
}

type Grouped = BTreeMap<String, BTreeMap<u64, Vec<f64>>>;

fn group(rows: &[ResultRow]) -> Grouped {
    let mut g: Grouped = BTreeMap::new();
    for r in rows {
        g.entry(r.statistic.clone()).or_default().entry(r.horizon.to_bits()).or_default().push(r.value);
    }
    g
}

/// Regenerate `plots/*.svg` and `summary.md` from `results.csv` and the
/// manifest. Returns the files written.
pub fn emit_report(dir: &Path) -> Result<Vec<PathBuf>> {
    let results = dir.join(RESULTS_FILE);
    if !results.exists() {
        return Err(Error::Report(format!("{} not found", results.display())));
    }
    let rows = read_results(&results)?;
    if rows.is_empty() {
        return Err(Error::Report(format!("{} holds no results", results.display())));
    }
    let manifest = read_manifest(dir).ok().flatten();
    let gamma_ref = manifest.as_ref().and_then(|m| m.summary.gamma_ref);
    let grouped = group(&rows);
    let plots = dir.join(PLOTS_DIR);
    fs::create_dir_all(&plots)?;
    let mut written = Vec::new();
    for (stat, by_t) in &grouped {
        if UNPLOTTED.contains(&stat.as_str()) {
            continue;
        }
        let series: Vec<Series> = by_t
            .iter()
            .map(|(bits, vals)| Series { x: f64::from_bits(*bits), values: vals.clone() })
            .collect();
        let reference = match stat.as_str() {
            "er_max" | "endpoint_sup" => gamma_ref,
            _ => None,
        };
        let svg = scatter_plot(&format!("{stat} vs T"), "T", stat, &series, reference);
        let path = plots.join(format!("{stat}.svg"));
        fs::write(&path, svg)?;
        written.push(path);
    }
    let summary = summary_markdown(&grouped, manifest.as_ref());
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, summary)?;
    written.push(path);
    Ok(written)
}

fn summary_markdown(grouped: &Grouped, manifest: Option<&Manifest>) -> String {
    let mut out = String::from("# Run summary\n\n");
    if let Some(m) = manifest {
        let s = &m.summary;
        let _ = writeln!(out, "- version: {}", m.version);
        let _ = writeln!(out, "- sweep: {:?}, metric: {}, flavor: {:?}", m.config.kind, s.metric.name(), s.flavor);
        if let Some(c) = s.c {
            let _ = writeln!(out, "- c: {c}");
        }
        let _ = writeln!(out, "- critical c: {}", s.critical_c);
        if let Some(g) = s.gamma_ref {
            let _ = writeln!(out, "- reference γ(1/c): {g}");
        }
        if let Some(b) = s.bv_bound {
            let _ = writeln!(out, "- BV bound M: {b}");
        }
        let _ = writeln!(out, "- tolerance: {}", m.config.tolerance);
        for w in &s.warnings {
            let _ = writeln!(out, "- warning: {w}");
        }
        out.push('\n');
    }
    out.push_str("| statistic | T | median | min | max | n |\n|---|---|---|---|---|---|\n");
    for (stat, by_t) in grouped {
        for (bits, vals) in by_t {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let med = median(vals).unwrap_or(f64::NAN);
            let _ = writeln!(out, "| {stat} | {} | {med:.6} | {lo:.6} | {hi:.6} | {} |", f64::from_bits(*bits), vals.len());
        }
    }
    out
}
