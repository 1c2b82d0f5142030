//! TOML run configuration.
//!
//! A document may name a `preset`; the preset is loaded first and the
//! document's own keys are merged over it table by table. Every default is
//! written back into the parsed [`RunConfig`], so emitting it reproduces the
//! run exactly.
//!
//! ```toml
//! preset = "fig7"            # optional
//! model = "free"             # or a [model] table with `kind`
//! m = 0
//! m_values = [-1, 0, 1]      # azimuthal sectors for scans
//! levels = 3
//! workers = 4                # optional
//! strict = false
//!
//! [physics]                  # hbar, mu, e, k, omega, B0, PhiB
//! [grid]                     # r_min, r_max, n_intervals
//! [solver]                   # tol_lambda, tol_residual, max_iterations
//! [convergence]              # check, tol_rel, delta_rmax
//! [scan]                     # parameter, values
//! [density]                  # omegas, n_r
//! [output]                   # dir, plot
//! [[u_override]]             # coefficient, power: raw U(r) = Σ c r^p
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::discretize::RadialGrid;
use crate::eig::SolverTolerances;
use crate::error::Error;
use crate::model::{Parameter, PhysicalParams, PotentialModel};
use crate::presets;
use crate::scan::ScanAxis;
use crate::solve::{ConvergenceSettings, Potential, PowerTerm, ProblemSpec};

/// A rejected config: the offending key path and the rule it broke.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub reason: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config: {}", self.reason)
        } else {
            write!(f, "config key `{}`: {}", self.path, self.reason)
        }
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub n_intervals: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_min: RadialGrid::DEFAULT_R_MIN,
            r_max: RadialGrid::DEFAULT_R_MAX,
            n_intervals: RadialGrid::DEFAULT_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    /// Run the three-way check for every solve or scan point.
    pub check: bool,
    pub tol_rel: f64,
    pub delta_rmax: Option<f64>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        let s = ConvergenceSettings::default();
        Self {
            check: false,
            tol_rel: s.tol_rel,
            delta_rmax: s.delta_rmax,
        }
    }
}

impl ConvergenceConfig {
    pub fn settings(&self) -> ConvergenceSettings {
        ConvergenceSettings {
            tol_rel: self.tol_rel,
            delta_rmax: self.delta_rmax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub omegas: Vec<f64>,
    pub n_r: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "helix-sturm-out".into(),
            plot: false,
        }
    }
}

fn default_model() -> PotentialModel {
    PotentialModel::Free
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub m: i32,
    #[serde(default)]
    pub m_values: Option<Vec<i32>>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub physics: PhysicalParams,
    #[serde(default = "default_model")]
    pub model: PotentialModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_override: Option<Vec<PowerTerm>>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverTolerances,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn grid(&self) -> Result<RadialGrid, SchemaError> {
        RadialGrid::new(self.grid.r_min, self.grid.r_max, self.grid.n_intervals)
            .map_err(|e| SchemaError::new("grid", e.to_string()))
    }

    pub fn potential(&self) -> Potential {
        match &self.u_override {
            Some(terms) => Potential::PowerSeries(terms.clone()),
            None => Potential::Model(self.model),
        }
    }

    /// The single-sector problem described by this config.
    pub fn problem_spec(&self) -> Result<ProblemSpec, SchemaError> {
        Ok(ProblemSpec {
            params: self.physics,
            m: self.m,
            potential: self.potential(),
            grid: self.grid()?,
            levels: self.levels,
            tolerances: self.solver,
        })
    }

    /// Azimuthal sectors to visit: `m_values`, materialized to `[m]`.
    pub fn sectors(&self) -> Vec<i32> {
        self.m_values.clone().unwrap_or_else(|| vec![self.m])
    }

    /// Serializes the fully materialized config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }

    fn materialize(&mut self) {
        if self.m_values.is_none() {
            self.m_values = Some(vec![self.m]);
        }
        if self.convergence.delta_rmax.is_none() {
            self.convergence.delta_rmax = Some(0.25 * (self.grid.r_max - self.grid.r_min));
        }
    }

    fn validate(&self) -> Result<(), SchemaError> {
        let param_path = |e: Error, prefix: &str| match e {
            Error::InvalidParameter { name, reason } => {
                SchemaError::new(format!("{prefix}.{name}"), reason)
            }
            other => SchemaError::new(prefix, other.to_string()),
        };
        self.physics.validate().map_err(|e| param_path(e, "physics"))?;
        if self.u_override.is_none() {
            self.model.validate().map_err(|e| param_path(e, "model"))?;
        }
        if let Some(terms) = &self.u_override {
            if terms.is_empty() {
                return Err(SchemaError::new("u_override", "needs at least one term"));
            }
            for (i, t) in terms.iter().enumerate() {
                if !(t.coefficient.is_finite() && t.power.is_finite()) {
                    return Err(SchemaError::new(
                        format!("u_override[{i}]"),
                        "coefficient and power must be finite",
                    ));
                }
            }
        }

        let g = &self.grid;
        if g.r_min.is_nan() || g.r_min <= 0.0 {
            return Err(SchemaError::new(
                "grid.r_min",
                format!(
                    "must be > 0: the inner cutoff keeps the 1/r² terms finite (got {})",
                    g.r_min
                ),
            ));
        }
        if g.r_max.is_nan() || g.r_max <= g.r_min || !g.r_max.is_finite() {
            return Err(SchemaError::new(
                "grid.r_max",
                format!("must be finite and exceed r_min = {} (got {})", g.r_min, g.r_max),
            ));
        }
        if g.n_intervals < 3 {
            return Err(SchemaError::new(
                "grid.n_intervals",
                format!("must be ≥ 3 (got {})", g.n_intervals),
            ));
        }
        let dim = g.n_intervals - 1;
        if self.levels == 0 || self.levels > dim {
            return Err(SchemaError::new(
                "levels",
                format!("must lie in 1..={dim} for this grid (got {})", self.levels),
            ));
        }
        self.solver.validate().map_err(|e| SchemaError::new("solver", e.to_string()))?;

        let c = &self.convergence;
        if !(c.tol_rel.is_finite() && c.tol_rel > 0.0) {
            return Err(SchemaError::new(
                "convergence.tol_rel",
                format!("must be > 0 (got {})", c.tol_rel),
            ));
        }
        if let Some(d) = c.delta_rmax {
            if !(d.is_finite() && d > 0.0) {
                return Err(SchemaError::new(
                    "convergence.delta_rmax",
                    format!("must be > 0 (got {d})"),
                ));
            }
        }
        if matches!(&self.m_values, Some(v) if v.is_empty()) {
            return Err(SchemaError::new("m_values", "must not be empty"));
        }
        if self.workers == Some(0) {
            return Err(SchemaError::new("workers", "must be ≥ 1"));
        }

        if let Some(axis) = &self.scan {
            axis.validate().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => SchemaError::new(name, reason),
                other => SchemaError::new("scan", other.to_string()),
            })?;
            let applies = self.u_override.is_some()
                || axis.parameter.get(&self.physics, self.m, &self.model).is_some();
            if !applies {
                return Err(SchemaError::new(
                    "scan.parameter",
                    format!(
                        "`{}` does not apply to the `{}` model",
                        axis.parameter,
                        self.model.name()
                    ),
                ));
            }
            if self.u_override.is_some() && !matches!(axis.parameter, Parameter::Omega | Parameter::M | Parameter::B0 | Parameter::PhiB) {
                return Err(SchemaError::new(
                    "scan.parameter",
                    "model parameters cannot be swept with u_override",
                ));
            }
        }
        if let Some(d) = &self.density {
            ScanAxis::new(Parameter::Omega, d.omegas.clone())
                .map_err(|e| SchemaError::new("density.omegas", e.to_string()))?;
            if d.n_r.is_empty() {
                return Err(SchemaError::new("density.n_r", "must not be empty"));
            }
            if let Some(&n) = d.n_r.iter().find(|&&n| n >= dim) {
                return Err(SchemaError::new(
                    "density.n_r",
                    format!("radial index {n} exceeds the grid dimension {dim}"),
                ));
            }
        }
        Ok(())
    }
}

/// Rewrites the `model = "name"` shorthand as `[model] kind = "name"`.
fn expand_model_shorthand(table: &mut Table) {
    if let Some(Value::String(kind)) = table.get("model") {
        let mut t = Table::new();
        t.insert("kind".into(), Value::String(kind.clone()));
        table.insert("model".into(), Value::Table(t));
    }
}

/// Merges `over` into `base`. Tables merge recursively; everything else is
/// replaced. A `model` table of a different `kind` replaces the base model.
fn merge(base: &mut Table, over: Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => {
                let same_kind = key != "model" || b.get("kind") == o.get("kind") || o.get("kind").is_none();
                if same_kind {
                    merge(b, o);
                } else {
                    *b = o;
                }
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Parses and validates a TOML config document.
pub fn parse_config(text: &str) -> Result<RunConfig, SchemaError> {
    parse_config_with_preset(text, None)
}

/// As [`parse_config`], with `preset` taking the place of the document's own
/// `preset` key when given.
pub fn parse_config_with_preset(text: &str, preset: Option<&str>) -> Result<RunConfig, SchemaError> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| SchemaError::new("", e.message().trim().to_string()))?;
    if let Some(name) = preset {
        table.insert("preset".into(), Value::String(name.into()));
    }
    expand_model_shorthand(&mut table);
    if let Some(preset) = table.get("preset").cloned() {
        let Value::String(name) = preset else {
            return Err(SchemaError::new("preset", "must be a string"));
        };
        let doc = presets::document(&name).ok_or_else(|| {
            let known: Vec<_> = presets::names().collect();
            SchemaError::new(
                "preset",
                format!("unknown preset `{name}` (known: {})", known.join(", ")),
            )
        })?;
        let mut base: Table = doc.parse().expect("shipped presets are valid TOML");
        expand_model_shorthand(&mut base);
        merge(&mut base, table);
        table = base;
    }

    let mut config: RunConfig = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        SchemaError::new(path, e.into_inner().message().trim().to_string())
    })?;
    config.validate()?;
    config.materialize();
    Ok(config)
}

/// The config a named preset expands to.
pub fn preset_config(name: &str) -> Result<RunConfig, SchemaError> {
    parse_config_with_preset("", Some(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("model = \"free\"\nm = 0\n").unwrap();
        assert_eq!(c.physics, PhysicalParams::default());
        assert_eq!(c.physics.omega, 1.0);
        assert_eq!((c.physics.b0, c.physics.phi_b), (0.0, 0.0));
        assert_eq!(c.model, PotentialModel::Free);
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.m_values, Some(vec![0]));
        assert_eq!(c.convergence.delta_rmax, Some(0.25 * (20.0 - 1e-3)));
        assert_eq!(c.solver, SolverTolerances::default());
        assert!(!c.strict);
    }

    #[test]
    fn zero_cutoff_is_rejected_with_its_rule() {
        let e = parse_config("[grid]\nr_min = 0\n").unwrap_err();
        assert_eq!(e.path, "grid.r_min");
        assert!(e.reason.contains("> 0"), "{e}");
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let e = parse_config("[grid]\nr_mn = 1e-3\n").unwrap_err();
        assert_eq!(e.path, "grid.r_mn");
        assert!(e.reason.contains("unknown field"), "{e}");
        let e = parse_config("[model]\nkind = \"cornell\"\na = 1\nb = 0.1\nc = 3\n").unwrap_err();
        assert!(e.path.starts_with("model"), "{e:?}");
        let e = parse_config("colour = 1\n").unwrap_err();
        assert!(e.reason.contains("colour"));
        let e = parse_config("[physics]\nB0 = \"strong\"\n").unwrap_err();
        assert_eq!(e.path, "physics.B0");
    }

    #[test]
    fn range_violations() {
        for (doc, path) in [
            ("[physics]\nhbar = -1\n", "physics.hbar"),
            ("[model]\nkind = \"kratzer\"\nA = 0\nD = 1\n", "model.A"),
            ("[model]\nkind = \"morse_small\"\nD = 1\na = 0.2\nr0 = -5\n", "model.r0"),
            ("levels = 0\n", "levels"),
            ("[grid]\nn_intervals = 2\n", "grid.n_intervals"),
            ("[grid]\nr_min = 2.0\nr_max = 1.0\n", "grid.r_max"),
            ("[convergence]\ntol_rel = 0\n", "convergence.tol_rel"),
            ("[scan]\nparameter = \"omega\"\nvalues = [2, 1]\n", "scan.values"),
            ("[scan]\nparameter = \"m\"\nvalues = [0, 0.5]\n", "scan.values"),
            ("[scan]\nparameter = \"kratzer_A\"\nvalues = [1]\n", "scan.parameter"),
            ("[density]\nomegas = []\nn_r = [0]\n", "density.omegas"),
            ("m_values = []\n", "m_values"),
            ("workers = 0\n", "workers"),
            ("preset = \"fig99\"\n", "preset"),
        ] {
            let e = parse_config(doc).unwrap_err();
            assert_eq!(e.path, path, "{doc}: {e}");
        }
        assert_eq!(parse_config("m = 0.5\n").unwrap_err().path, "m");
        assert_eq!(parse_config("= nonsense").unwrap_err().path, "");
    }

    #[test]
    fn fig2_preset() {
        let c = preset_config("fig2").unwrap();
        assert_eq!(c.physics.hbar, 1.0);
        assert_eq!(c.physics.mu, 1.0);
        assert_eq!(c.physics.e, 1.0);
        assert_eq!(c.physics.k, 1.0);
        assert_eq!(c.physics.b0, 0.5);
        assert_eq!(c.physics.phi_b, 0.5);
        assert_eq!(c.model, PotentialModel::Free);
        assert_eq!(c.m_values, Some(vec![-1, 0, 1]));
        assert_eq!(c.scan.as_ref().unwrap().parameter, Parameter::Omega);
        assert!(c.convergence.check);
    }

    #[test]
    fn user_keys_override_preset() {
        let c = parse_config("preset = \"fig7\"\nlevels = 2\n[model]\nb = 0.5\n[grid]\nn_intervals = 500\n")
            .unwrap();
        assert_eq!(c.levels, 2);
        assert_eq!(c.model, PotentialModel::Cornell { coulomb: 1.0, linear: 0.5 });
        assert_eq!(c.grid.n_intervals, 500);
        assert_eq!(c.grid.r_min, 1e-4);
        let c = parse_config("preset = \"fig7\"\nmodel = \"free\"\n[scan]\nparameter = \"omega\"\nvalues = [1]\n").unwrap();
        assert_eq!(c.model, PotentialModel::Free);
    }

    #[test]
    fn every_preset_parses() {
        for name in presets::names() {
            let c = preset_config(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(c.scan.is_some() || c.density.is_some(), "{name}");
            assert!(presets::summary(name).is_some());
        }
    }

    #[test]
    fn override_terms() {
        let c = parse_config(
            "[[u_override]]\ncoefficient = 1.0\npower = 2.0\n[grid]\nr_min = 1e-6\nr_max = 12\nn_intervals = 6000\n",
        )
        .unwrap();
        let spec = c.problem_spec().unwrap();
        assert_eq!(spec.u(3.0), 9.0);
    }

    #[test]
    fn emitted_config_round_trips_for_presets() {
        for name in presets::names() {
            let c = preset_config(name).unwrap();
            let text = c.to_toml();
            assert_eq!(parse_config(&text).unwrap(), c, "{name}\n{text}");
        }
    }

    fn any_model() -> impl Strategy<Value = PotentialModel> {
        prop_oneof![
            Just(PotentialModel::Free),
            (-3.0..3.0f64, -1.0..1.0f64).prop_map(|(a, b)| PotentialModel::Cornell { coulomb: a, linear: b }),
            (0.1..3.0f64, 0.1..3.0f64).prop_map(|(a, d)| PotentialModel::Kratzer { range: a, depth: d }),
            (0.1..3.0f64, 0.05..1.0f64, 0.5..10.0f64)
                .prop_map(|(d, a, r0)| PotentialModel::MorseSmall { depth: d, stiffness: a, r0 }),
        ]
    }

    proptest! {
        #[test]
        fn parse_emit_round_trip(
            model in any_model(),
            omega in -3.0..3.0f64,
            b0 in -1.0..1.0f64,
            m in -6i32..6,
            levels in 1usize..6,
            n in 10usize..5000,
            r_min in 1e-6..0.5f64,
            width in 1.0..50.0f64,
            check: bool,
            strict: bool,
            workers in proptest::option::of(1usize..16),
        ) {
            let c = RunConfig {
                preset: None,
                m,
                m_values: Some(vec![m, m + 1]),
                levels,
                workers,
                strict,
                physics: PhysicalParams { omega, b0, ..PhysicalParams::default() },
                model,
                u_override: None,
                grid: GridConfig { r_min, r_max: r_min + width, n_intervals: n },
                solver: SolverTolerances::default(),
                convergence: ConvergenceConfig { check, tol_rel: 1e-6, delta_rmax: Some(0.5) },
                scan: Some(ScanAxis { parameter: Parameter::Omega, values: vec![0.5, 1.0 + omega.abs()] }),
                density: Some(DensityConfig { omegas: vec![1.0], n_r: vec![0] }),
                output: OutputConfig::default(),
            };
            let parsed = parse_config(&c.to_toml()).unwrap();
            prop_assert_eq!(parsed, c);
        }
    }
}
