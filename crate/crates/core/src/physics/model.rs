use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::approx::{
    expansion_capacitance, expansion_force_norm, pfa_capacitance, pfa_force_norm,
    smallsep_capacitance, ExpansionMode,
};
use super::geometry::{
    ExpansionCoefficients, ModifiedLensGeometry, ParasiticParams, SphereGeometry, ThetaParameter,
};
use super::lens::{modified_capacitance, modified_force_norm};
use super::sphere::{exact_capacitance, exact_force_norm};
use crate::constants::EPSILON0;
use crate::error::{Error, Result};

/// Linear background `a1 - a2 d`.
pub fn parasitic_capacitance(d: f64, params: &ParasiticParams) -> f64 {
    params.a1 - params.a2 * d
}

/// The closed-form capacitance laws a dataset can be compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    ExactSphere {
        geometry: SphereGeometry,
    },
    PfaLeading {
        geometry: SphereGeometry,
    },
    SmallSepLog {
        geometry: SphereGeometry,
        theta: ThetaParameter,
    },
    Expansion {
        geometry: SphereGeometry,
        theta: ThetaParameter,
        #[serde(default)]
        mode: ExpansionMode,
    },
    ModifiedLens {
        geometry: ModifiedLensGeometry,
        /// F
        c_tilde: f64,
    },
    /// a1 + a3 d^0.3 with d in metres; a1 in F, a3 in F·m^-0.3.
    PowerLaw {
        a1: f64,
        a3: f64,
    },
    /// a1 + a3 ln(R/d).
    IdealLog {
        a1: f64,
        a3: f64,
        geometry: SphereGeometry,
    },
}

impl ModelKind {
    /// Ideal-sphere log law with the theoretical slope a3 = 2πε0 R.
    pub fn ideal_log_theoretical(a1: f64, geometry: SphereGeometry) -> Self {
        ModelKind::IdealLog {
            a1,
            a3: 2.0 * PI * EPSILON0 * geometry.radius(),
            geometry,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::ExactSphere { .. } => "exact",
            ModelKind::PfaLeading { .. } => "pfa",
            ModelKind::SmallSepLog { .. } => "smallsep",
            ModelKind::Expansion { .. } => "expansion",
            ModelKind::ModifiedLens { .. } => "modified",
            ModelKind::PowerLaw { .. } => "powerlaw",
            ModelKind::IdealLog { .. } => "ideallog",
        }
    }

    pub fn capacitance(&self, d: f64) -> Result<f64> {
        match *self {
            ModelKind::ExactSphere { geometry } => exact_capacitance(d, &geometry),
            ModelKind::PfaLeading { geometry } => pfa_capacitance(d, &geometry),
            ModelKind::SmallSepLog { geometry, theta } => smallsep_capacitance(d, &geometry, theta),
            ModelKind::Expansion {
                geometry,
                theta,
                mode,
            } => expansion_capacitance(
                d,
                &geometry,
                theta,
                &ExpansionCoefficients::standard(),
                mode,
            ),
            ModelKind::ModifiedLens { geometry, c_tilde } => {
                modified_capacitance(d, &geometry, c_tilde)
            }
            ModelKind::PowerLaw { a1, a3 } => {
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::domain(
                        "power_law",
                        "d",
                        d,
                        "separation must be >= 0",
                    ));
                }
                Ok(a1 + a3 * d.powf(0.3))
            }
            ModelKind::IdealLog { a1, a3, geometry } => {
                if !(d > 0.0) || !d.is_finite() {
                    return Err(Error::domain("ideal_log", "d", d, "separation must be > 0"));
                }
                Ok(a1 + a3 * (geometry.radius() / d).ln())
            }
        }
    }

    /// -F/(V-V0)^2 = -(1/2) dC/dd, in F/m.
    pub fn force_norm(&self, d: f64) -> Result<f64> {
        match *self {
            ModelKind::ExactSphere { geometry } => exact_force_norm(d, &geometry),
            ModelKind::PfaLeading { geometry } | ModelKind::SmallSepLog { geometry, .. } => {
                pfa_force_norm(d, &geometry)
            }
            ModelKind::Expansion { geometry, .. } => {
                expansion_force_norm(d, &geometry, &ExpansionCoefficients::standard())
            }
            ModelKind::ModifiedLens { geometry, .. } => modified_force_norm(d, &geometry),
            ModelKind::PowerLaw { a3, .. } => {
                if !(d > 0.0) || !d.is_finite() {
                    return Err(Error::domain("power_law", "d", d, "separation must be > 0"));
                }
                Ok(-0.5 * 0.3 * a3 * d.powf(-0.7))
            }
            ModelKind::IdealLog { a3, .. } => {
                if !(d > 0.0) || !d.is_finite() {
                    return Err(Error::domain("ideal_log", "d", d, "separation must be > 0"));
                }
                Ok(0.5 * a3 / d)
            }
        }
    }
}

/// A capacitance law plus an optional parasitic background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitanceModelSpec {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parasitic: Option<ParasiticParams>,
}

impl CapacitanceModelSpec {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            parasitic: None,
        }
    }

    pub fn with_parasitic(model: ModelKind, parasitic: ParasiticParams) -> Self {
        Self {
            model,
            parasitic: Some(parasitic),
        }
    }

    pub fn capacitance(&self, d: f64) -> Result<f64> {
        let c = self.model.capacitance(d)?;
        Ok(match &self.parasitic {
            Some(p) => c + parasitic_capacitance(d, p),
            None => c,
        })
    }

    pub fn force_norm(&self, d: f64) -> Result<f64> {
        let f = self.model.force_norm(d)?;
        Ok(match &self.parasitic {
            Some(p) => f + 0.5 * p.a2,
            None => f,
        })
    }
}

impl From<ModelKind> for CapacitanceModelSpec {
    fn from(model: ModelKind) -> Self {
        Self::new(model)
    }
}

/// Capacitance of `spec` at separation `d`, in F.
pub fn evaluate_model(spec: &CapacitanceModelSpec, d: f64) -> Result<f64> {
    spec.capacitance(d)
}
