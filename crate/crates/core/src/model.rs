//! Physical parameters and potential evaluation.
//!
//! Everything here is a pure function of its inputs. The reduced radial
//! problem is `-f'' + U(r) f = λ f` with
//!
//! ```text
//! U(r)    = (2μ/ħ²) V_eff(r)
//! V_eff   = V(r) + (ħ²/2μ) (V₁(r) - 1/(4r²))
//! V₁(r)   = m²/r² + k²(1+ω²) - 2mωk/r + (2ωke/r) A_φ - (2me/r²) A_φ + (e²/r²) A_φ²
//! A_φ(r)  = -(B₀/2) r² + Φ_B/(2π)
//! ```
//!
//! Evaluation is total for `r > 0`; grids never include `r = 0`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Background constants entering the universal term `V₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mu: f64,
    /// Charge coupling to the vector potential.
    pub e: f64,
    /// Longitudinal wavenumber.
    pub k: f64,
    /// Dimensionless torsion strength.
    pub omega: f64,
    /// Uniform magnetic field along z.
    #[serde(rename = "B0", alias = "b0")]
    pub b0: f64,
    /// Aharonov–Bohm flux.
    #[serde(rename = "PhiB", alias = "phi_b")]
    pub phi_b: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mu: 1.0,
            e: 1.0,
            k: 1.0,
            omega: 1.0,
            b0: 0.0,
            phi_b: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("mu", self.mu),
            ("e", self.e),
            ("k", self.k),
            ("omega", self.omega),
            ("B0", self.b0),
            ("PhiB", self.phi_b),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        positive("hbar", self.hbar)?;
        positive("mu", self.mu)?;
        Ok(())
    }

    /// ħ²/2μ, the factor converting operator eigenvalues to energies.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mu)
    }

    pub fn energy_from_lambda(&self, lambda: f64) -> f64 {
        self.kinetic_scale() * lambda
    }

    pub fn lambda_from_energy(&self, energy: f64) -> f64 {
        energy / self.kinetic_scale()
    }
}

/// Azimuthal quantum number together with the number of radial levels wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    pub m: i32,
    pub requested_levels: usize,
}

impl QuantumNumbers {
    pub fn new(m: i32, requested_levels: usize) -> Result<Self> {
        if requested_levels == 0 {
            return Err(Error::InvalidParameter {
                name: "levels",
                reason: "at least one radial level must be requested".into(),
            });
        }
        Ok(Self { m, requested_levels })
    }
}

/// External radial interaction `V(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialModel {
    Free,
    /// `a/r + b r`, implemented with the sign as written.
    Cornell {
        #[serde(rename = "a")]
        coulomb: f64,
        #[serde(rename = "b")]
        linear: f64,
    },
    /// `-2D (A/r - A²/(2r²))`.
    Kratzer {
        #[serde(rename = "A")]
        range: f64,
        #[serde(rename = "D")]
        depth: f64,
    },
    /// Second-order expansion of the Morse well about `r0`:
    /// `D a² r² - 2 D a² r0 r + D (a² r0² - 1)`.
    MorseSmall {
        #[serde(rename = "D")]
        depth: f64,
        #[serde(rename = "a")]
        stiffness: f64,
        r0: f64,
    },
}

impl PotentialModel {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialModel::Free => "free",
            PotentialModel::Cornell { .. } => "cornell",
            PotentialModel::Kratzer { .. } => "kratzer",
            PotentialModel::MorseSmall { .. } => "morse_small",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialModel::Free => Ok(()),
            PotentialModel::Cornell { coulomb, linear } => {
                finite("a", coulomb)?;
                finite("b", linear)
            }
            PotentialModel::Kratzer { range, depth } => {
                positive("A", range)?;
                positive("D", depth)
            }
            PotentialModel::MorseSmall {
                depth,
                stiffness,
                r0,
            } => {
                positive("D", depth)?;
                positive("a", stiffness)?;
                positive("r0", r0)
            }
        }
    }

    /// Constant term `D₁ = D (a² r0² - 1)` of the Morse expansion.
    pub fn morse_offset(&self) -> Option<f64> {
        match *self {
            PotentialModel::MorseSmall {
                depth,
                stiffness,
                r0,
            } => Some(depth * (stiffness * stiffness * r0 * r0 - 1.0)),
            _ => None,
        }
    }
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be > 0, got {value}"),
        })
    }
}

/// Azimuthal component of the vector potential.
pub fn a_phi(r: f64, p: &PhysicalParams) -> f64 {
    -0.5 * p.b0 * r * r + p.phi_b / (2.0 * PI)
}

pub fn external_potential(r: f64, model: &PotentialModel) -> f64 {
    match *model {
        PotentialModel::Free => 0.0,
        PotentialModel::Cornell { coulomb, linear } => coulomb / r + linear * r,
        PotentialModel::Kratzer { range, depth } => {
            -2.0 * depth * (range / r - range * range / (2.0 * r * r))
        }
        PotentialModel::MorseSmall {
            depth,
            stiffness,
            r0,
        } => {
            let da2 = depth * stiffness * stiffness;
            da2 * r * r - 2.0 * da2 * r0 * r + depth * (stiffness * stiffness * r0 * r0 - 1.0)
        }
    }
}

/// Universal geometric and electromagnetic term `V₁`.
pub fn v1(r: f64, p: &PhysicalParams, m: i32) -> f64 {
    let m = f64::from(m);
    let a = a_phi(r, p);
    let r2 = r * r;
    m * m / r2 + p.k * p.k * (1.0 + p.omega * p.omega) - 2.0 * m * p.omega * p.k / r
        + 2.0 * p.omega * p.k * p.e / r * a
        - 2.0 * m * p.e / r2 * a
        + p.e * p.e / r2 * a * a
}

pub fn v_eff(r: f64, p: &PhysicalParams, m: i32, model: &PotentialModel) -> f64 {
    external_potential(r, model) + p.kinetic_scale() * (v1(r, p, m) - 0.25 / (r * r))
}

/// Potential entering the Sturm–Liouville operator, `(2μ/ħ²) V_eff`.
pub fn u_of_r(r: f64, p: &PhysicalParams, m: i32, model: &PotentialModel) -> f64 {
    v_eff(r, p, m, model) / p.kinetic_scale()
}

/// Bundles everything needed to evaluate `U(r)` for one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub params: PhysicalParams,
    pub m: i32,
    pub model: PotentialModel,
}

impl EffectivePotential {
    pub fn new(params: PhysicalParams, m: i32, model: PotentialModel) -> Self {
        Self { params, m, model }
    }

    pub fn u(&self, r: f64) -> f64 {
        u_of_r(r, &self.params, self.m, &self.model)
    }

    pub fn v_eff(&self, r: f64) -> f64 {
        v_eff(r, &self.params, self.m, &self.model)
    }

    /// Analytic `∂U/∂p` at `r`. Returns `None` for `m` (not continuous) and for
    /// parameters that do not belong to the active model.
    pub fn du_dparam(&self, r: f64, param: Parameter) -> Option<f64> {
        let p = &self.params;
        let m = f64::from(self.m);
        let s = 1.0 / p.kinetic_scale();
        let a = a_phi(r, p);
        let r2 = r * r;
        // ∂V₁/∂A_φ
        let dv1_da = 2.0 * p.omega * p.k * p.e / r - 2.0 * m * p.e / r2 + 2.0 * p.e * p.e * a / r2;
        match (param, self.model) {
            (Parameter::Omega, _) => {
                Some(2.0 * p.k * p.k * p.omega - 2.0 * m * p.k / r + 2.0 * p.k * p.e * a / r)
            }
            (Parameter::B0, _) => Some(dv1_da * (-0.5 * r2)),
            (Parameter::PhiB, _) => Some(dv1_da / (2.0 * PI)),
            (Parameter::CornellA, PotentialModel::Cornell { .. }) => Some(s / r),
            (Parameter::CornellB, PotentialModel::Cornell { .. }) => Some(s * r),
            (Parameter::KratzerA, PotentialModel::Kratzer { range, depth }) => {
                Some(s * (-2.0 * depth / r + 2.0 * depth * range / r2))
            }
            (Parameter::KratzerD, PotentialModel::Kratzer { range, .. }) => {
                Some(s * (-2.0 * range / r + range * range / r2))
            }
            (
                Parameter::MorseD,
                PotentialModel::MorseSmall {
                    stiffness, r0, ..
                },
            ) => Some(s * (stiffness * stiffness * (r - r0) * (r - r0) - 1.0)),
            (
                Parameter::MorseA,
                PotentialModel::MorseSmall {
                    depth,
                    stiffness,
                    r0,
                },
            ) => Some(s * 2.0 * depth * stiffness * (r - r0) * (r - r0)),
            (
                Parameter::MorseR0,
                PotentialModel::MorseSmall {
                    depth,
                    stiffness,
                    r0,
                },
            ) => Some(s * -2.0 * depth * stiffness * stiffness * (r - r0)),
            _ => None,
        }
    }
}

/// Scalar knobs that can be swept or differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "cornell_a")]
    CornellA,
    #[serde(rename = "cornell_b")]
    CornellB,
    #[serde(rename = "kratzer_A")]
    KratzerA,
    #[serde(rename = "kratzer_D")]
    KratzerD,
    #[serde(rename = "morse_D")]
    MorseD,
    #[serde(rename = "morse_a")]
    MorseA,
    #[serde(rename = "morse_r0")]
    MorseR0,
    #[serde(rename = "B0")]
    B0,
    #[serde(rename = "PhiB")]
    PhiB,
}

impl Parameter {
    pub const ALL: [Parameter; 11] = [
        Parameter::Omega,
        Parameter::M,
        Parameter::CornellA,
        Parameter::CornellB,
        Parameter::KratzerA,
        Parameter::KratzerD,
        Parameter::MorseD,
        Parameter::MorseA,
        Parameter::MorseR0,
        Parameter::B0,
        Parameter::PhiB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Omega => "omega",
            Parameter::M => "m",
            Parameter::CornellA => "cornell_a",
            Parameter::CornellB => "cornell_b",
            Parameter::KratzerA => "kratzer_A",
            Parameter::KratzerD => "kratzer_D",
            Parameter::MorseD => "morse_D",
            Parameter::MorseA => "morse_a",
            Parameter::MorseR0 => "morse_r0",
            Parameter::B0 => "B0",
            Parameter::PhiB => "PhiB",
        }
    }

    /// Current value of the parameter, if it applies to `model`.
    pub fn get(self, params: &PhysicalParams, m: i32, model: &PotentialModel) -> Option<f64> {
        use PotentialModel::*;
        match (self, *model) {
            (Parameter::Omega, _) => Some(params.omega),
            (Parameter::M, _) => Some(f64::from(m)),
            (Parameter::B0, _) => Some(params.b0),
            (Parameter::PhiB, _) => Some(params.phi_b),
            (Parameter::CornellA, Cornell { coulomb, .. }) => Some(coulomb),
            (Parameter::CornellB, Cornell { linear, .. }) => Some(linear),
            (Parameter::KratzerA, Kratzer { range, .. }) => Some(range),
            (Parameter::KratzerD, Kratzer { depth, .. }) => Some(depth),
            (Parameter::MorseD, MorseSmall { depth, .. }) => Some(depth),
            (Parameter::MorseA, MorseSmall { stiffness, .. }) => Some(stiffness),
            (Parameter::MorseR0, MorseSmall { r0, .. }) => Some(r0),
            _ => None,
        }
    }

    /// Writes `value` into the matching field. `m` must be integral.
    pub fn set(
        self,
        value: f64,
        params: &mut PhysicalParams,
        m: &mut i32,
        model: &mut PotentialModel,
    ) -> Result<()> {
        use PotentialModel::*;
        match (self, model) {
            (Parameter::Omega, _) => params.omega = value,
            (Parameter::B0, _) => params.b0 = value,
            (Parameter::PhiB, _) => params.phi_b = value,
            (Parameter::M, _) => {
                if value.fract() != 0.0 || value.abs() > f64::from(i32::MAX) {
                    return Err(Error::InvalidParameter {
                        name: "m",
                        reason: format!("must be an integer, got {value}"),
                    });
                }
                *m = value as i32;
            }
            (Parameter::CornellA, Cornell { coulomb, .. }) => *coulomb = value,
            (Parameter::CornellB, Cornell { linear, .. }) => *linear = value,
            (Parameter::KratzerA, Kratzer { range, .. }) => *range = value,
            (Parameter::KratzerD, Kratzer { depth, .. }) => *depth = value,
            (Parameter::MorseD, MorseSmall { depth, .. }) => *depth = value,
            (Parameter::MorseA, MorseSmall { stiffness, .. }) => *stiffness = value,
            (Parameter::MorseR0, MorseSmall { r0, .. }) => *r0 = value,
            (param, model) => {
                return Err(Error::InvalidParameter {
                    name: param.name(),
                    reason: format!("does not apply to the `{}` model", model.name()),
                })
            }
        }
        Ok(())
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
