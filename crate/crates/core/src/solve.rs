//! Potential → operator → eigenpairs → energies and normalized radial
//! functions, plus the three-way convergence check.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretize::{assemble_with_offdiag, laplacian_offdiag, RadialGrid};
use crate::eig::{lowest_eigenpairs, EigenRequest, SolverTolerances};
use crate::error::{Error, Result};
use crate::model::{u_of_r, EffectivePotential, Parameter, PhysicalParams, PotentialModel};

/// One term `coefficient · r^power` of a raw `U(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub power: f64,
}

/// What produces `U(r)`.
#[derive(Clone)]
pub enum Potential {
    Model(PotentialModel),
    /// `U(r) = Σ c r^p`, used directly in operator units (no `2μ/ħ²` factor).
    PowerSeries(Vec<PowerTerm>),
    /// Arbitrary `U(r)` for test harnesses, also in operator units.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Model(m) => f.debug_tuple("Model").field(m).finish(),
            Potential::PowerSeries(t) => f.debug_tuple("PowerSeries").field(t).finish(),
            Potential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Potential {
    pub fn model(&self) -> Option<&PotentialModel> {
        match self {
            Potential::Model(m) => Some(m),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Potential::Model(m) => m.name(),
            Potential::PowerSeries(_) => "u_override",
            Potential::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub params: PhysicalParams,
    pub m: i32,
    pub potential: Potential,
    pub grid: RadialGrid,
    pub levels: usize,
    pub tolerances: SolverTolerances,
}

impl ProblemSpec {
    pub fn new(
        params: PhysicalParams,
        m: i32,
        model: PotentialModel,
        grid: RadialGrid,
        levels: usize,
    ) -> Self {
        Self {
            params,
            m,
            potential: Potential::Model(model),
            grid,
            levels,
            tolerances: SolverTolerances::default(),
        }
    }

    /// Spec driven by a raw `U(r)` in operator units.
    pub fn with_u<F>(u: F, grid: RadialGrid, levels: usize) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            params: PhysicalParams::default(),
            m: 0,
            potential: Potential::Custom(Arc::new(u)),
            grid,
            levels,
            tolerances: SolverTolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Potential::Model(model) = &self.potential {
            model.validate()?;
        }
        if let Potential::PowerSeries(terms) = &self.potential {
            if let Some(t) = terms
                .iter()
                .find(|t| !(t.coefficient.is_finite() && t.power.is_finite()))
            {
                return Err(Error::InvalidParameter {
                    name: "u_override",
                    reason: format!("non-finite term {t:?}"),
                });
            }
        }
        if self.levels == 0 || self.levels > self.grid.dimension() {
            return Err(Error::InvalidParameter {
                name: "levels",
                reason: format!(
                    "must lie in 1..={} for this grid, got {}",
                    self.grid.dimension(),
                    self.levels
                ),
            });
        }
        self.tolerances.validate()
    }

    pub fn with_grid(&self, grid: RadialGrid) -> Self {
        Self {
            grid,
            ..self.clone()
        }
    }

    /// Copy with `param` set to `value`. Model parameters require a model
    /// potential that owns them.
    pub fn with_parameter(&self, param: Parameter, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let mut model = out.potential.model().copied().unwrap_or(PotentialModel::Free);
        param.set(value, &mut out.params, &mut out.m, &mut model)?;
        if let Potential::Model(slot) = &mut out.potential {
            *slot = model;
        }
        Ok(out)
    }

    /// `U(r)` in operator units.
    pub fn u(&self, r: f64) -> f64 {
        match &self.potential {
            Potential::Model(model) => u_of_r(r, &self.params, self.m, model),
            Potential::PowerSeries(terms) => terms
                .iter()
                .map(|t| t.coefficient * r.powf(t.power))
                .sum(),
            Potential::Custom(f) => f(r),
        }
    }

    /// `∂U/∂p`, available for model potentials only.
    pub fn du_dparam(&self, r: f64, param: Parameter) -> Option<f64> {
        let model = *self.potential.model()?;
        EffectivePotential::new(self.params, self.m, model).du_dparam(r, param)
    }

    /// Energy in physical units. Raw `U` inputs use the same `ħ²/2μ` scale.
    pub fn energy(&self, lambda: f64) -> f64 {
        self.params.energy_from_lambda(lambda)
    }
}

/// Grid and solver settings a result was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Provenance {
    pub r_min: f64,
    pub r_max: f64,
    pub n_intervals: usize,
    pub dr: f64,
    pub tolerances: SolverTolerances,
}

impl Provenance {
    fn new(grid: &RadialGrid, tolerances: SolverTolerances) -> Self {
        Self {
            r_min: grid.r_min(),
            r_max: grid.r_max(),
            n_intervals: grid.n_intervals(),
            dr: grid.dr(),
            tolerances,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub lambdas: Vec<f64>,
    pub energies: Vec<f64>,
    /// `f_n` on the interior nodes with `∫|f|² dr = 1`.
    pub functions: Vec<Vec<f64>>,
    /// Interior sign changes of each `f_n`.
    pub node_counts: Vec<usize>,
    pub spec: ProblemSpec,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn grid(&self) -> &RadialGrid {
        &self.spec.grid
    }

    /// `f_n` on all `N + 1` nodes, including the Dirichlet zeros.
    pub fn full_function(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid().n_intervals() + 1);
        out.push(0.0);
        out.extend_from_slice(&self.functions[n]);
        out.push(0.0);
        out
    }

    /// `ρ_n = |f_n|²` on all nodes.
    pub fn density(&self, n: usize) -> Vec<f64> {
        density(&self.full_function(n))
    }

    /// `dλ_n/dp = ⟨f_n| ∂U/∂p |f_n⟩`, from the discrete eigenvector.
    pub fn dlambda_dparam(&self, n: usize, param: Parameter) -> Option<f64> {
        let dr = self.grid().dr();
        let mut acc = 0.0;
        for (r, f) in self.grid().interior_nodes().zip(&self.functions[n]) {
            acc += self.spec.du_dparam(r, param)? * f * f;
        }
        Some(acc * dr)
    }
}

/// Lowest `spec.levels` bound states.
pub fn solve_bound_states(spec: &ProblemSpec) -> Result<Spectrum> {
    let offdiag = laplacian_offdiag(&spec.grid);
    solve_with_offdiag(spec, offdiag)
}

/// As [`solve_bound_states`], reusing an off-diagonal built for `spec.grid`.
pub fn solve_with_offdiag(spec: &ProblemSpec, offdiag: Arc<[f64]>) -> Result<Spectrum> {
    spec.validate()?;
    let grid = spec.grid;
    let t = assemble_with_offdiag(&grid, |r| spec.u(r), offdiag)?;
    let pairs = lowest_eigenpairs(&t, &EigenRequest::with_tolerances(spec.levels, spec.tolerances))?;

    // The Euclidean vector v relates to the continuum function by f = v/√dr.
    let scale = 1.0 / grid.dr().sqrt();
    let mut states: Vec<(f64, usize, Vec<f64>)> = pairs
        .into_iter()
        .map(|p| {
            let f: Vec<f64> = p.vector.iter().map(|v| v * scale).collect();
            let f = normalize(&f, &grid).unwrap_or(f);
            (p.lambda, count_nodes(&f), f)
        })
        .collect();
    states.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let lambdas: Vec<f64> = states.iter().map(|s| s.0).collect();
    Ok(Spectrum {
        energies: lambdas.iter().map(|&l| spec.energy(l)).collect(),
        node_counts: states.iter().map(|s| s.1).collect(),
        functions: states.into_iter().map(|s| s.2).collect(),
        lambdas,
        provenance: Provenance::new(&grid, spec.tolerances),
        spec: spec.clone(),
    })
}

/// Trapezoidal `∫ g dr` over the full grid. `samples` holds either all
/// `N + 1` node values or the `N - 1` interior values with zero endpoints.
pub fn trapezoid(samples: &[f64], grid: &RadialGrid) -> Result<f64> {
    let n = grid.n_intervals();
    let dr = grid.dr();
    if samples.len() == n + 1 {
        let inner: f64 = samples[1..n].iter().sum();
        Ok(dr * (inner + 0.5 * (samples[0] + samples[n])))
    } else if samples.len() + 1 == n {
        Ok(dr * samples.iter().sum::<f64>())
    } else {
        Err(Error::InvalidRequest(format!(
            "{} samples do not match a grid with {n} intervals",
            samples.len()
        )))
    }
}

/// Rescales `f` so that the trapezoidal `∫|f|² dr` equals one.
pub fn normalize(f: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let squares: Vec<f64> = f.iter().map(|x| x * x).collect();
    let norm2 = trapezoid(&squares, grid)?;
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(Error::ZeroFunction);
    }
    let s = 1.0 / norm2.sqrt();
    Ok(f.iter().map(|x| x * s).collect())
}

/// `ρ_i = |f_i|²`.
pub fn density(f: &[f64]) -> Vec<f64> {
    f.iter().map(|x| x * x).collect()
}

/// `ξ_i = f_i / √r_i` on the same nodes as `f`.
pub fn reconstruct_xi(f: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let n = grid.n_intervals();
    let nodes: Vec<f64> = if f.len() == n + 1 {
        grid.nodes()
    } else if f.len() + 1 == n {
        grid.interior_nodes().collect()
    } else {
        return Err(Error::InvalidRequest(format!(
            "{} samples do not match a grid with {n} intervals",
            f.len()
        )));
    };
    Ok(f.iter().zip(nodes).map(|(x, r)| x / r.sqrt()).collect())
}

/// Sign changes of `f`, ignoring samples below `1e-8` of its peak.
pub fn count_nodes(f: &[f64]) -> usize {
    let peak = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-8 * peak;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in f.iter().filter(|x| x.abs() > floor) {
        if last != 0.0 && x.signum() != last {
            changes += 1;
        }
        last = x.signum();
    }
    changes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSettings {
    pub tol_rel: f64,
    /// Outer-boundary extension. `None` means a quarter of the domain width.
    pub delta_rmax: Option<f64>,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        Self {
            tol_rel: 1e-6,
            delta_rmax: None,
        }
    }
}

impl ConvergenceSettings {
    pub fn delta_for(&self, grid: &RadialGrid) -> f64 {
        self.delta_rmax
            .unwrap_or(0.25 * (grid.r_max() - grid.r_min()))
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub baseline: Spectrum,
    /// `|λ' - λ| / max(1, |λ|)` under `N → 2N`.
    pub refined_grid: Vec<f64>,
    /// Same, under `r_max → r_max + Δ` at fixed spacing.
    pub enlarged_domain: Vec<f64>,
    /// Same, under `r_min → r_min / 2` at fixed `N`.
    pub reduced_cutoff: Vec<f64>,
    pub converged: Vec<bool>,
    /// `log2(|λ_N - λ_2N| / |λ_2N - λ_4N|)`; NaN when undefined.
    pub estimated_order: Vec<f64>,
    pub tol_rel: f64,
    pub delta_rmax: f64,
}

impl ConvergenceReport {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn relative_shifts(base: &[f64], other: &[f64]) -> Vec<f64> {
    base.iter()
        .zip(other)
        .map(|(a, b)| (b - a).abs() / a.abs().max(1.0))
        .collect()
}

/// Re-solves under grid refinement, domain enlargement and cutoff halving,
/// and compares each level against the baseline.
pub fn converge(spec: &ProblemSpec, tol_rel: f64, delta_rmax: f64) -> Result<ConvergenceReport> {
    if !(tol_rel.is_finite() && tol_rel > 0.0) {
        return Err(Error::InvalidRequest(format!("tol_rel must be > 0, got {tol_rel}")));
    }
    if !(delta_rmax.is_finite() && delta_rmax > 0.0) {
        return Err(Error::InvalidRequest(format!(
            "delta_rmax must be > 0, got {delta_rmax}"
        )));
    }
    spec.validate()?;
    let g = spec.grid;
    let n = g.n_intervals();
    let extra = ((delta_rmax / g.dr()).round() as usize).max(1);
    let enlarged = RadialGrid::new(
        g.r_min(),
        g.r_min() + (n + extra) as f64 * g.dr(),
        n + extra,
    )?;
    let specs = [
        spec.clone(),
        spec.with_grid(g.with_intervals(2 * n)?),
        spec.with_grid(g.with_intervals(4 * n)?),
        spec.with_grid(enlarged),
        spec.with_grid(RadialGrid::new(0.5 * g.r_min(), g.r_max(), n)?),
    ];
    let ((base, fine), (finer, (big, cut))) = rayon::join(
        || rayon::join(|| solve_bound_states(&specs[0]), || solve_bound_states(&specs[1])),
        || {
            rayon::join(
                || solve_bound_states(&specs[2]),
                || rayon::join(|| solve_bound_states(&specs[3]), || solve_bound_states(&specs[4])),
            )
        },
    );
    let (base, fine, finer, big, cut) = (base?, fine?, finer?, big?, cut?);

    let refined_grid = relative_shifts(&base.lambdas, &fine.lambdas);
    let enlarged_domain = relative_shifts(&base.lambdas, &big.lambdas);
    let reduced_cutoff = relative_shifts(&base.lambdas, &cut.lambdas);
    let converged = (0..spec.levels)
        .map(|i| refined_grid[i] < tol_rel && enlarged_domain[i] < tol_rel && reduced_cutoff[i] < tol_rel)
        .collect();
    let estimated_order = (0..spec.levels)
        .map(|i| {
            let d1 = (base.lambdas[i] - fine.lambdas[i]).abs();
            let d2 = (fine.lambdas[i] - finer.lambdas[i]).abs();
            if d1 > 0.0 && d2 > 0.0 {
                (d1 / d2).log2()
            } else {
                f64::NAN
            }
        })
        .collect();
    Ok(ConvergenceReport {
        baseline: base,
        refined_grid,
        enlarged_domain,
        reduced_cutoff,
        converged,
        estimated_order,
        tol_rel,
        delta_rmax,
    })
}
