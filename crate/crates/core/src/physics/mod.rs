//! Closed-form electrostatics of a sphere (or modified lens) above a plane.

mod approx;
mod exponent;
mod geometry;
mod lens;
mod model;
mod sphere;

pub use approx::{
    expansion_capacitance, expansion_force_norm, pfa_capacitance, pfa_force_norm,
    smallsep_capacitance, ExpansionMode, EXPANSION_VALIDITY_RATIO, SMALLSEP_VALIDITY_RATIO,
};
pub use exponent::{effective_exponent, ExponentResult, ForceLaw};
pub use geometry::{
    ExpansionCoefficients, ModifiedLensGeometry, ParasiticParams, SphereGeometry, ThetaParameter,
    VoltageConfig,
};
pub use lens::{
    large_separation_offset, modified_capacitance, modified_capacitance_large,
    modified_capacitance_small, modified_force_norm, POWER_LAW_A1, POWER_LAW_A3,
};
pub use model::{evaluate_model, parasitic_capacitance, CapacitanceModelSpec, ModelKind};
pub use sphere::{
    alpha_parameter, electrostatic_energy, exact_capacitance, exact_capacitance_series,
    exact_force, exact_force_norm, exact_force_norm_series, MAX_SERIES_TERMS, SERIES_REL_TOL,
};
