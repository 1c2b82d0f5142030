//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a pipeline error or (with `--strict`) any
//! failed scan point or unconverged level, 2 on a bad config or command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{parse_config_with_preset, RunConfig, SchemaError};
use crate::output::{self, Manifest};
use crate::presets;
use crate::scan::{resolve_workers, scan_density, scan_spectrum, ScanOptions};
use crate::solve::{converge, solve_bound_states, ConvergenceReport};

#[derive(Debug, Parser)]
#[command(name = "helix-sturm", version, about = "Bound-state spectra of the reduced radial problem in a helically twisted background")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest levels for one azimuthal sector.
    Solve(RunArgs),
    /// Spectrum along the `[scan]` axis for every sector in `m_values`.
    Scan(RunArgs),
    /// Probability densities for the `[density]` torsion values.
    Density(RunArgs),
    /// Grid refinement, domain enlargement and cutoff halving checks.
    Converge(RunArgs),
    /// Print a named preset as a config document.
    Preset {
        name: Option<String>,
        /// List the shipped presets.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML config document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset; keys in --config override it.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config and the environment).
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 1 if any point fails or any checked level does not converge.
    #[arg(long)]
    strict: bool,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(format!("i/o error: {e}"))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Preset { name, list } => preset_command(name.as_deref(), list),
        Command::Solve(a) => with_config(&a, "solve", run_solve),
        Command::Scan(a) => with_config(&a, "scan", run_scan),
        Command::Density(a) => with_config(&a, "density", run_density),
        Command::Converge(a) => with_config(&a, "converge", run_converge),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn preset_command(name: Option<&str>, list: bool) -> Result<i32, Failure> {
    if list || name.is_none() {
        for n in presets::names() {
            println!("{n:<14} {}", presets::summary(n).unwrap_or_default());
        }
        return Ok(0);
    }
    let name = name.unwrap_or_default();
    match presets::document(name) {
        Some(doc) => {
            print!("{doc}");
            Ok(0)
        }
        None => Err(Failure::Config(format!("unknown preset `{name}`"))),
    }
}

/// Effective settings after folding command-line overrides into the config.
struct Context {
    config: RunConfig,
    out_dir: PathBuf,
    workers: usize,
    plot: bool,
}

fn load_config(args: &RunArgs) -> Result<Context, Failure> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut config = parse_config_with_preset(&text, args.preset.as_deref())?;
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be ≥ 1".into()));
        }
        config.workers = Some(w);
    }
    config.strict |= args.strict;
    config.output.plot |= args.plot;
    if let Some(out) = &args.out {
        config.output.dir = out.to_string_lossy().into_owned();
    }
    Ok(Context {
        workers: resolve_workers(config.workers),
        out_dir: PathBuf::from(&config.output.dir),
        plot: config.output.plot,
        config,
    })
}

fn with_config(
    args: &RunArgs,
    name: &str,
    body: fn(&Context, &mut Outputs) -> Result<Outcome, Failure>,
) -> Result<i32, Failure> {
    let ctx = load_config(args)?;
    let mut outputs = Outputs::new(&ctx.out_dir);
    let outcome = body(&ctx, &mut outputs)?;
    let manifest = Manifest {
        subcommand: name,
        config: &ctx.config,
        workers: ctx.workers,
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0.0, |d| d.as_secs_f64()),
        convergence: outcome.convergence,
        failures: outcome.failures,
        outputs: outputs.names.clone(),
        extra: outcome.extra,
    };
    let text = serde_json::to_string_pretty(&manifest.to_json())
        .map_err(|e| Failure::Run(format!("manifest serialization failed: {e}")))?;
    outputs.write("manifest.json", &text)?;
    for p in &outputs.paths {
        println!("{}", p.display());
    }
    Ok(if ctx.config.strict && outcome.strict_violation { 1 } else { 0 })
}

struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
    paths: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            names: Vec::new(),
            paths: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = output::write_file(&self.dir, name, contents)?;
        self.names.push(name.to_string());
        self.paths.push(path);
        Ok(())
    }
}

struct Outcome {
    convergence: Value,
    failures: Value,
    extra: Value,
    strict_violation: bool,
}

fn convergence_json(ctx: &Context, reports: &[ConvergenceReport]) -> Value {
    let c = &ctx.config.convergence;
    json!({
        "check": c.check || !reports.is_empty(),
        "tol_rel": c.tol_rel,
        "delta_rmax": c.delta_rmax,
        "all_converged": reports.iter().all(ConvergenceReport::all_converged),
        "sectors": reports.iter().map(|r| json!({
            "m": r.baseline.spec.m,
            "converged": r.converged,
            "refined_grid": r.refined_grid,
            "enlarged_domain": r.enlarged_domain,
            "reduced_cutoff": r.reduced_cutoff,
            "estimated_order": r.estimated_order,
        })).collect::<Vec<_>>(),
    })
}

fn warn_unconverged(reports: &[ConvergenceReport]) -> bool {
    let mut any = false;
    for r in reports {
        for (n, ok) in r.converged.iter().enumerate() {
            if !ok {
                any = true;
                eprintln!(
                    "warning: m={} n_r={n} not converged (shifts: refine {:.2e}, enlarge {:.2e}, cutoff {:.2e}; tol {:.1e})",
                    r.baseline.spec.m,
                    r.refined_grid[n],
                    r.enlarged_domain[n],
                    r.reduced_cutoff[n],
                    r.tol_rel
                );
            }
        }
    }
    any
}

fn delta_rmax(ctx: &Context) -> f64 {
    let g = &ctx.config.grid;
    ctx.config
        .convergence
        .delta_rmax
        .unwrap_or(0.25 * (g.r_max - g.r_min))
}

fn run_solve(ctx: &Context, out: &mut Outputs) -> Result<Outcome, Failure> {
    let spec = ctx.config.problem_spec()?;
    let (spectrum, reports) = if ctx.config.convergence.check {
        let rep = converge(&spec, ctx.config.convergence.tol_rel, delta_rmax(ctx))?;
        (rep.baseline.clone(), vec![rep])
    } else {
        (solve_bound_states(&spec)?, Vec::new())
    };
    out.write("spectrum.csv", &output::spectrum_csv(&spectrum))?;
    out.write("functions.csv", &output::functions_csv(&spectrum))?;
    if !reports.is_empty() {
        out.write("convergence.csv", &output::convergence_csv(&reports))?;
    }
    if ctx.plot {
        out.write("spectrum.svg", &output::spectrum_plot(&spectrum))?;
    }
    let unconverged = warn_unconverged(&reports);
    Ok(Outcome {
        convergence: convergence_json(ctx, &reports),
        failures: json!([]),
        extra: json!({
            "m": spec.m,
            "potential": spec.potential.label(),
            "node_counts": spectrum.node_counts,
        }),
        strict_violation: unconverged,
    })
}

fn run_scan(ctx: &Context, out: &mut Outputs) -> Result<Outcome, Failure> {
    let axis = ctx
        .config
        .scan
        .clone()
        .ok_or_else(|| Failure::Config("the scan subcommand needs a [scan] table".into()))?;
    let base = ctx.config.problem_spec()?;
    let options = ScanOptions {
        workers: Some(ctx.workers),
        convergence: ctx.config.convergence.check.then(|| ctx.config.convergence.settings()),
    };
    let res = scan_spectrum(&base, &axis, &ctx.config.sectors(), ctx.config.levels, &options)?;
    out.write("scan.csv", &output::scan_csv(&res))?;
    if ctx.plot {
        out.write("scan.svg", &output::scan_plot(&res))?;
    }
    for f in &res.failures {
        eprintln!(
            "warning: {}={} m={} failed: {}",
            axis.parameter, f.axis_value, f.m, f.message
        );
    }
    let unconverged: Vec<Value> = res
        .rows
        .iter()
        .filter(|r| r.converged == Some(false))
        .map(|r| json!({"axis_value": r.axis_value, "m": r.m, "n_r": r.n_r}))
        .collect();
    if !unconverged.is_empty() {
        eprintln!(
            "warning: {} of {} rows did not pass the convergence checks",
            unconverged.len(),
            res.rows.len()
        );
    }
    let checked = options.convergence.is_some();
    Ok(Outcome {
        convergence: json!({
            "check": checked,
            "tol_rel": ctx.config.convergence.tol_rel,
            "delta_rmax": ctx.config.convergence.delta_rmax,
            "all_converged": checked.then_some(unconverged.is_empty()),
            "unconverged_rows": unconverged,
        }),
        failures: serde_json::to_value(&res.failures).unwrap_or(Value::Null),
        extra: json!({
            "axis": res.axis.parameter.name(),
            "points": res.axis.values.len(),
            "m_values": res.m_values(),
            "levels": res.levels,
            "rows": res.rows.len(),
            "started_unix": res.metadata.started,
            "finished_unix": res.metadata.finished,
        }),
        strict_violation: !res.failures.is_empty() || !unconverged.is_empty(),
    })
}

fn run_density(ctx: &Context, out: &mut Outputs) -> Result<Outcome, Failure> {
    let d = ctx
        .config
        .density
        .clone()
        .ok_or_else(|| Failure::Config("the density subcommand needs a [density] table".into()))?;
    let mut base = ctx.config.problem_spec()?;
    base.levels = base.levels.max(d.n_r.iter().max().map_or(1, |n| n + 1));
    let res = scan_density(&base, &d.omegas, &d.n_r, Some(ctx.workers))?;
    out.write("density.csv", &output::density_csv(&res))?;
    if ctx.plot {
        out.write("density.svg", &output::density_plot(&res))?;
    }
    let mut mismatched = false;
    for c in &res.curves {
        if c.nodes != c.n_r {
            mismatched = true;
            eprintln!("warning: omega={} n_r={} has {} nodes", c.omega, c.n_r, c.nodes);
        }
    }
    for f in &res.failures {
        eprintln!("warning: omega={} failed: {}", f.axis_value, f.message);
    }
    Ok(Outcome {
        convergence: json!({"check": false}),
        failures: serde_json::to_value(&res.failures).unwrap_or(Value::Null),
        extra: json!({
            "m": res.m,
            "curves": res.curves.iter().map(|c| json!({
                "omega": c.omega, "n_r": c.n_r, "norm": c.norm, "nodes": c.nodes,
            })).collect::<Vec<_>>(),
        }),
        strict_violation: !res.failures.is_empty() || mismatched,
    })
}

fn run_converge(ctx: &Context, out: &mut Outputs) -> Result<Outcome, Failure> {
    let base = ctx.config.problem_spec()?;
    let delta = delta_rmax(ctx);
    let tol = ctx.config.convergence.tol_rel;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers)
        .build()
        .map_err(|e| Failure::Run(format!("cannot start worker pool: {e}")))?;
    let reports = pool.install(|| {
        ctx.config
            .sectors()
            .into_iter()
            .map(|m| {
                let mut spec = base.clone();
                spec.m = m;
                converge(&spec, tol, delta)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    out.write("convergence.csv", &output::convergence_csv(&reports))?;
    let unconverged = warn_unconverged(&reports);
    Ok(Outcome {
        convergence: convergence_json(ctx, &reports),
        failures: json!([]),
        extra: json!({}),
        strict_violation: unconverged,
    })
}
