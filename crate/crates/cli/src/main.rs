use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use erfl_core::erfl_lab::{erdos_renyi_max, erdos_renyi_max_discrete, run_experiment, ExperimentConfig};
use erfl_core::path_space::{GridFunction, Interpretation, Metric};
use erfl_core::process_sim::simulate_path;
use erfl_core::rate_functionals::{dist_to_level_set, level_set_net_with, LevelSet, NetOptions, Topology};
use erfl_core::report::{emit_report, write_run};
use erfl_core::transforms::{gamma_level, Crossing};
use erfl_core::{ExtReal, LevySpec, RateProfile};

#[derive(Parser)]
#[command(name = "erfl", version, about = "Increment ensembles of Lévy processes and their limit sets")]
struct Cli {
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, env = "ERFL_THREADS")]
    threads: Option<usize>,
    /// Progress and summaries on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write it as CSV or binary.
    Simulate(SimulateArgs),
    /// Evaluate the rate function Ψ.
    Conjugate(ConjugateArgs),
    /// Evaluate γ(u), the largest z ≥ 0 with Ψ(z) ≤ u.
    Gamma(GammaArgs),
    /// Maximal normalized increment over windows of length c log T.
    #[command(name = "erfl-max")]
    ErflMax(ErflMaxArgs),
    /// Run a sweep from a JSON config into a run directory.
    Sweep(SweepArgs),
    /// Build a finite net of a level set.
    Net(NetArgs),
    /// Distance from a function to a level set.
    Dist(DistArgs),
    /// Regenerate plots and the summary of a run directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Process spec (JSON).
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathFormat {
    Csv,
    Binary,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long = "T")]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid cells per unit time.
    #[arg(long, default_value_t = 16)]
    resolution: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: PathFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConjugateArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    a: Vec<f64>,
}

#[derive(Args)]
struct GammaArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    u: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct ErflMaxArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long = "T")]
    horizon: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    stride: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    resolution: usize,
    /// Integer windows ⌊c log n⌋ at integer starts.
    #[arg(long)]
    discrete: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the master seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overwrite a completed run.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Uniform,
    Weak,
}

#[derive(Args)]
struct NetArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    level: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    topology: TopologyArg,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 500)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    level: f64,
    #[arg(long, default_value = "uniform")]
    metric: Metric,
    /// Node values f(k/m), k = 0..m, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "input")]
    values: Vec<f64>,
    /// File with node values separated by commas or newlines.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Treat the values as a right-continuous step function.
    #[arg(long)]
    step: bool,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory.
    #[arg(long)]
    out: PathBuf,
}

/// Errors that are the caller's fault exit with 1, everything else with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<erfl_core::Error>() {
            return if e.is_validation() { 1 } else { 2 };
        }
        if cause.downcast_ref::<Invalid>().is_some() {
            return 1;
        }
    }
    2
}

#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn read_spec(path: &Path) -> anyhow::Result<LevySpec> {
    let text = fs::read_to_string(path).map_err(|e| Invalid(format!("cannot read {}: {e}", path.display())))?;
    LevySpec::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn fmt_ext(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => v.to_string(),
        ExtReal::PosInf => "inf".into(),
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let spec = read_spec(&args.spec.spec)?;
    if args.resolution == 0 {
        bail!(Invalid("resolution must be positive".into()));
    }
    let cells = (args.resolution as f64 * args.horizon).ceil().max(2.0) as usize;
    let path = simulate_path(&spec, args.horizon, cells, args.seed)?;
    let mut w = output(args.out.as_deref())?;
    match args.format {
        PathFormat::Csv => path.write_csv(&mut w)?,
        PathFormat::Binary => path.write_binary(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn conjugate(args: ConjugateArgs) -> anyhow::Result<()> {
    let profile = RateProfile::new(&read_spec(&args.spec.spec)?)?;
    let mut w = output(None)?;
    writeln!(w, "a,conjugate")?;
    for a in args.a {
        if !a.is_finite() {
            bail!(Invalid(format!("argument {a} must be finite")));
        }
        writeln!(w, "{a},{}", fmt_ext(profile.conjugate(a)))?;
    }
    w.flush()?;
    Ok(())
}

fn gamma(args: GammaArgs) -> anyhow::Result<()> {
    let profile = RateProfile::new(&read_spec(&args.spec.spec)?)?;
    let mut w = output(None)?;
    writeln!(w, "u,gamma")?;
    for u in args.u {
        let g = match gamma_level(&profile, u, args.tol)? {
            Crossing::Finite(z) | Crossing::Edge(z) => format!("{z:.10}"),
            Crossing::Empty => String::new(),
        };
        writeln!(w, "{u},{g}")?;
    }
    w.flush()?;
    Ok(())
}

fn erfl_max(args: ErflMaxArgs) -> anyhow::Result<()> {
    let spec = read_spec(&args.spec.spec)?;
    if args.resolution == 0 {
        bail!(Invalid("resolution must be positive".into()));
    }
    let cells = (args.resolution as f64 * args.horizon).ceil().max(2.0) as usize;
    let path = simulate_path(&spec, args.horizon, cells, args.seed)?;
    let v = if args.discrete {
        erdos_renyi_max_discrete(&path, args.c)?
    } else {
        erdos_renyi_max(&path, args.c, args.stride)?
    };
    println!("T,c,er_max");
    println!("{},{},{v}", args.horizon, args.c);
    Ok(())
}

fn sweep(args: SweepArgs, verbose: bool) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    erfl_core::report::check_overwrite(&args.out, args.force)?;
    if verbose {
        eprintln!(
            "sweep {:?}: {} horizons × {} replicates, seed {}",
            cfg.kind,
            cfg.horizons.len(),
            cfg.replicates,
            cfg.seed
        );
    }
    let record = run_experiment(&cfg)?;
    write_run(&args.out, &record, args.force)?;
    if verbose {
        for w in &record.summary.warnings {
            eprintln!("warning: {w}");
        }
        eprintln!("{} rows in {:.2}s", record.rows.len(), record.elapsed_secs);
    }
    println!("{}", args.out.display());
    Ok(())
}

fn net(args: NetArgs) -> anyhow::Result<()> {
    let profile = RateProfile::new(&read_spec(&args.spec.spec)?)?;
    let topology = match args.topology {
        TopologyArg::Uniform => Topology::Uniform,
        TopologyArg::Weak => Topology::Weak,
    };
    let set = LevelSet::new(profile, args.level, topology, None)?;
    let opts = NetOptions { budget: args.budget, seed: args.seed, ..NetOptions::default() };
    let net = level_set_net_with(&set, args.eps, args.m, opts)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "member,s,value")?;
    for (i, f) in net.members.iter().enumerate() {
        let m = f.resolution() as f64;
        for (k, v) in f.values().iter().enumerate() {
            writeln!(w, "{i},{},{v}", k as f64 / m)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_values(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Invalid(format!("not a number: `{s}`")).into()))
        .collect()
}

fn dist(args: DistArgs) -> anyhow::Result<()> {
    let profile = RateProfile::new(&read_spec(&args.spec.spec)?)?;
    let values = match &args.input {
        Some(p) => parse_values(
            &fs::read_to_string(p).map_err(|e| Invalid(format!("cannot read {}: {e}", p.display())))?,
        )?,
        None => args.values.clone(),
    };
    let interp = if args.step { Interpretation::CadlagStep } else { Interpretation::PiecewiseLinear };
    let f = GridFunction::new(values, interp)?;
    let topology = if args.metric == Metric::Hognas { Topology::Weak } else { Topology::Uniform };
    let set = LevelSet::new(profile, args.level, topology, None)?;
    let p = dist_to_level_set(&f, &set, args.metric, args.tol)?;
    println!("distance,lower,converged,iterations");
    println!("{},{},{},{}", p.distance, p.lower, p.converged, p.iterations);
    Ok(())
}

fn report(args: ReportArgs, verbose: bool) -> anyhow::Result<()> {
    let written = emit_report(&args.out)?;
    if verbose {
        for p in &written {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let verbose = cli.verbose;
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Conjugate(a) => conjugate(a),
        Command::Gamma(a) => gamma(a),
        Command::ErflMax(a) => erfl_max(a),
        Command::Sweep(a) => sweep(a, verbose),
        Command::Net(a) => net(a),
        Command::Dist(a) => dist(a),
        Command::Report(a) => report(a, verbose),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
