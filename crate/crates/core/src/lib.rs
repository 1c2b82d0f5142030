//! Bound-state spectra of the reduced radial Schrödinger equation
//! `-f'' + U(r) f = λ f` for a charged scalar in a helically twisted
//! background with a uniform magnetic field and an Aharonov–Bohm flux.

pub mod cli;
pub mod config;
pub mod discretize;
pub mod eig;
pub mod error;
pub mod model;
pub mod output;
pub mod presets;
pub mod scan;
pub mod solve;

pub use discretize::{assemble, build_grid, RadialGrid, TridiagonalOperator};
pub use eig::{count_below, lowest_eigenpairs, EigenPair, EigenRequest, SolverTolerances};
pub use error::{Error, Result};
pub use model::{EffectivePotential, Parameter, PhysicalParams, PotentialModel, QuantumNumbers};
pub use solve::{
    converge, solve_bound_states, ConvergenceReport, Potential, PowerTerm, ProblemSpec, Spectrum,
};
pub use scan::{scan_density, scan_spectrum, verify_m_asymmetry, ScanAxis, ScanOptions, ScanResult};
pub use config::{parse_config, RunConfig, SchemaError};
