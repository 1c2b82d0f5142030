//! Parameter sweeps, density profiles and the m → -m comparison.
//!
//! Every scan point is an independent solve. Points run on a rayon pool of
//! the requested width and results are sorted before they are returned, so
//! the output never depends on scheduling.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::laplacian_offdiag;
use crate::error::{Error, Result};
use crate::model::Parameter;
use crate::solve::{
    converge, count_nodes, solve_with_offdiag, trapezoid, ConvergenceSettings, ProblemSpec,
};

/// Environment variable that overrides the default worker count.
pub const WORKERS_ENV: &str = "HELIX_STURM_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub parameter: Parameter,
    pub values: Vec<f64>,
}

impl ScanAxis {
    pub fn new(parameter: Parameter, values: Vec<f64>) -> Result<Self> {
        let axis = Self { parameter, values };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::InvalidParameter {
                name: "scan.values",
                reason,
            })
        };
        if self.values.is_empty() {
            return bad("axis needs at least one value".into());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return bad(format!("non-finite value {v}"));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("values must be strictly ascending".into());
        }
        if self.parameter == Parameter::M {
            if let Some(v) = self.values.iter().find(|v| v.fract() != 0.0) {
                return bad(format!("m values must be integers, got {v}"));
            }
        }
        Ok(())
    }
}

/// Outcome of one scan point, repeated on each of its rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub axis_value: f64,
    pub m: i32,
    pub n_r: usize,
    pub lambda: f64,
    pub energy: f64,
    /// `None` when the convergence check was not requested.
    pub converged: Option<bool>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub axis_value: f64,
    pub m: i32,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanMetadata {
    pub r_min: f64,
    pub r_max: f64,
    pub n_intervals: usize,
    pub dr: f64,
    pub tolerances: crate::eig::SolverTolerances,
    pub convergence: Option<ConvergenceSettings>,
    pub workers: usize,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub base_spec: ProblemSpec,
    pub m_set: Vec<i32>,
    pub levels: usize,
    pub rows: Vec<ScanRow>,
    pub failures: Vec<PointFailure>,
    pub metadata: ScanMetadata,
}

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    /// Pool width. `None` reads the environment, then the CPU count.
    pub workers: Option<usize>,
    /// Run the three-way convergence check at every point.
    pub convergence: Option<ConvergenceSettings>,
}

/// Worker count from `explicit`, then the environment, then the CPU count.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn run_pool<T, F>(workers: usize, job: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

fn point_spec(base: &ProblemSpec, axis: Parameter, value: f64, m: i32, levels: usize) -> Result<ProblemSpec> {
    let mut spec = base.clone();
    spec.m = m;
    spec.levels = levels;
    let spec = spec.with_parameter(axis, value)?;
    spec.validate()?;
    Ok(spec)
}

/// Lambdas, energies and per-level convergence flags for one point.
type PointOutcome = Result<(Vec<f64>, Vec<f64>, Option<Vec<bool>>)>;

/// Solves every `axis value × m` point and records `levels` rows for each.
/// When the axis is `m`, the axis value is the azimuthal number and `m_set`
/// is ignored.
pub fn scan_spectrum(
    base: &ProblemSpec,
    axis: &ScanAxis,
    m_set: &[i32],
    levels: usize,
    options: &ScanOptions,
) -> Result<ScanResult> {
    axis.validate()?;
    if levels == 0 {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: "at least one radial level must be requested".into(),
        });
    }
    let m_set: Vec<i32> = if axis.parameter == Parameter::M {
        Vec::new()
    } else if m_set.is_empty() {
        vec![base.m]
    } else {
        m_set.to_vec()
    };
    if let Some(c) = &options.convergence {
        if !(c.tol_rel.is_finite() && c.tol_rel > 0.0) {
            return Err(Error::InvalidRequest(format!("tol_rel must be > 0, got {}", c.tol_rel)));
        }
    }
    let points: Vec<(f64, i32)> = axis
        .values
        .iter()
        .flat_map(|&v| {
            if axis.parameter == Parameter::M {
                vec![(v, v as i32)]
            } else {
                m_set.iter().map(|&m| (v, m)).collect()
            }
        })
        .collect();

    let workers = resolve_workers(options.workers);
    let offdiag = laplacian_offdiag(&base.grid);
    let started = now();
    let outcomes: Vec<PointOutcome> = run_pool(workers, || {
        points
            .par_iter()
            .map(|&(value, m)| {
                let spec = point_spec(base, axis.parameter, value, m, levels)?;
                match &options.convergence {
                    Some(c) => {
                        let rep = converge(&spec, c.tol_rel, c.delta_for(&spec.grid))?;
                        let s = rep.baseline;
                        Ok((s.lambdas, s.energies, Some(rep.converged)))
                    }
                    None => {
                        let s = solve_with_offdiag(&spec, offdiag.clone())?;
                        Ok((s.lambdas, s.energies, None))
                    }
                }
            })
            .collect()
    });
    let finished = now();

    let mut rows = Vec::with_capacity(points.len() * levels);
    let mut failures = Vec::new();
    for (&(axis_value, m), outcome) in points.iter().zip(outcomes) {
        match outcome {
            Ok((lambdas, energies, flags)) => {
                for n_r in 0..levels {
                    rows.push(ScanRow {
                        axis_value,
                        m,
                        n_r,
                        lambda: lambdas[n_r],
                        energy: energies[n_r],
                        converged: flags.as_ref().map(|f| f[n_r]),
                        status: RowStatus::Ok,
                    });
                }
            }
            Err(e) => {
                let message = e.to_string();
                for n_r in 0..levels {
                    rows.push(ScanRow {
                        axis_value,
                        m,
                        n_r,
                        lambda: f64::NAN,
                        energy: f64::NAN,
                        converged: options.convergence.map(|_| false),
                        status: RowStatus::Failed(message.clone()),
                    });
                }
                failures.push(PointFailure {
                    axis_value,
                    m,
                    message,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.axis_value
            .total_cmp(&b.axis_value)
            .then(a.m.cmp(&b.m))
            .then(a.n_r.cmp(&b.n_r))
    });

    let grid = base.grid;
    Ok(ScanResult {
        axis: axis.clone(),
        base_spec: base.clone(),
        m_set,
        levels,
        rows,
        failures,
        metadata: ScanMetadata {
            r_min: grid.r_min(),
            r_max: grid.r_max(),
            n_intervals: grid.n_intervals(),
            dr: grid.dr(),
            tolerances: base.tolerances,
            convergence: options.convergence,
            workers,
            started,
            finished,
        },
    })
}

impl ScanResult {
    /// Energies of one `(m, n_r)` branch in axis order, skipping failed points.
    pub fn branch(&self, m: i32, n_r: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.m == m && r.n_r == n_r && r.status == RowStatus::Ok)
            .map(|r| (r.axis_value, r.energy))
            .collect()
    }

    /// Distinct `m` values present in the rows, ascending.
    pub fn m_values(&self) -> Vec<i32> {
        let mut ms: Vec<i32> = self.rows.iter().map(|r| r.m).collect();
        ms.sort_unstable();
        ms.dedup();
        ms
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityCurve {
    pub omega: f64,
    pub n_r: usize,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    /// Trapezoidal `∫ρ dr`.
    pub norm: f64,
    /// Interior sign changes of the underlying `f`.
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityResult {
    pub m: i32,
    pub curves: Vec<DensityCurve>,
    pub failures: Vec<PointFailure>,
}

/// Normalized `ρ_{n_r}(r)` for every `ω × n_r`, on all grid nodes.
pub fn scan_density(
    base: &ProblemSpec,
    omegas: &[f64],
    n_r_set: &[usize],
    workers: Option<usize>,
) -> Result<DensityResult> {
    ScanAxis::new(Parameter::Omega, omegas.to_vec())?;
    let Some(&top) = n_r_set.iter().max() else {
        return Err(Error::InvalidParameter {
            name: "density.n_r",
            reason: "at least one radial index is required".into(),
        });
    };
    let levels = top + 1;
    let offdiag = laplacian_offdiag(&base.grid);
    let nodes = base.grid.nodes();
    let workers = resolve_workers(workers);
    let outcomes: Vec<Result<Vec<DensityCurve>>> = run_pool(workers, || {
        omegas
            .par_iter()
            .map(|&omega| {
                let spec = point_spec(base, Parameter::Omega, omega, base.m, levels)?;
                let s = solve_with_offdiag(&spec, offdiag.clone())?;
                n_r_set
                    .iter()
                    .map(|&n_r| {
                        let f = s.full_function(n_r);
                        let rho = s.density(n_r);
                        Ok(DensityCurve {
                            omega,
                            n_r,
                            r: nodes.clone(),
                            norm: trapezoid(&rho, &spec.grid)?,
                            nodes: count_nodes(&f),
                            rho,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    let mut curves = Vec::new();
    let mut failures = Vec::new();
    for (&omega, outcome) in omegas.iter().zip(outcomes) {
        match outcome {
            Ok(c) => curves.extend(c),
            Err(e) => failures.push(PointFailure {
                axis_value: omega,
                m: base.m,
                message: e.to_string(),
            }),
        }
    }
    curves.sort_by(|a, b| a.omega.total_cmp(&b.omega).then(a.n_r.cmp(&b.n_r)));
    Ok(DensityResult {
        m: base.m,
        curves,
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderPair {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// `max_n |E_n(m) - E_n(-m)|`.
    pub max_difference: f64,
}

impl LadderPair {
    fn new(plus: Vec<f64>, minus: Vec<f64>) -> Self {
        let max_difference = plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Self {
            plus,
            minus,
            max_difference,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryReport {
    pub m: i32,
    /// At the base gauge couplings.
    pub coupled: LadderPair,
    /// With `e = 0`.
    pub decoupled: LadderPair,
    /// `ω·k = 0`: the decoupled ladders must then coincide.
    pub symmetry_expected: bool,
    /// Energy tolerance used for `decoupled_symmetric`.
    pub tolerance: f64,
    pub decoupled_symmetric: bool,
}

/// Compares `E_n(m)` with `E_n(-m)` at the base couplings and with `e = 0`.
pub fn verify_m_asymmetry(base: &ProblemSpec, m: i32) -> Result<AsymmetryReport> {
    let ladder = |spec: &ProblemSpec, m: i32| -> Result<Vec<f64>> {
        let mut s = spec.clone();
        s.m = m;
        Ok(crate::solve::solve_bound_states(&s)?.energies)
    };
    let mut decoupled = base.clone();
    decoupled.params.e = 0.0;
    let coupled = LadderPair::new(ladder(base, m)?, ladder(base, -m)?);
    let decoupled = LadderPair::new(ladder(&decoupled, m)?, ladder(&decoupled, -m)?);
    let scale = decoupled
        .plus
        .iter()
        .fold(1.0f64, |acc, e| acc.max(e.abs()));
    let tolerance = 10.0 * base.tolerances.tol_lambda * scale;
    let p = base.params;
    Ok(AsymmetryReport {
        m,
        symmetry_expected: p.omega * p.k == 0.0,
        decoupled_symmetric: decoupled.max_difference <= tolerance,
        coupled,
        decoupled,
        tolerance,
    })
}
