//! Datasets, χ² objectives and the fitting procedures built on them.

mod chi2;
mod dataset;
mod fit;
mod piezo;
mod powerlaw;
mod report;
mod synth;

pub use chi2::{chi_squared, Chi2Value};
pub use dataset::{AbscissaKind, Dataset, Measurement};
pub use fit::{
    fit_linear, fit_with_contact_voltage, ContactVoltageFit, FitFamily, FitParam, FitResult,
    ProfileOptions,
};
pub use piezo::{piezo_to_separation, PiezoCalibration};
pub use powerlaw::{refit_power_law_constants, POWER_LAW_GRID_POINTS};
pub use report::{uncertainty_report, FitReport, ReportInputs, SynthSidecar, Versions};
pub use synth::{
    generate_synthetic, linear_design, mto_design, SigmaSpec, SynthSpec, GENERATOR_ID, MTO_SIGMA,
};
