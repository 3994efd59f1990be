//! χ² fits: exact linear solves for families whose free parameters enter
//! linearly, and a profiled fit over the piezo offset V⁰ on top of them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::chi2::{chi_squared, separations};
use super::dataset::{AbscissaKind, Dataset};
use super::piezo::PiezoCalibration;
use crate::error::{Error, Result};
use crate::numerics::{
    central_second_derivative, chi2_p_value, minimize_scalar, weighted_linear_least_squares,
    DEFAULT_TOL,
};
use crate::physics::{
    exact_capacitance, modified_capacitance, pfa_capacitance, CapacitanceModelSpec, ModelKind,
    ModifiedLensGeometry, ParasiticParams, SphereGeometry,
};

/// Model families whose free parameters enter linearly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitFamily {
    /// Exact sphere + A1 - A2 d; fits A1, A2.
    ExactParasitic { geometry: SphereGeometry },
    /// 2πε0 R ln(R/d) + A1 - A2 d; fits A1, A2.
    PfaParasitic { geometry: SphereGeometry },
    /// Modified lens + C̃; fits C̃.
    ModifiedLens { geometry: ModifiedLensGeometry },
    /// A1 + A3 ln(R/d); fits A1, A3.
    IdealLog { geometry: SphereGeometry },
    /// A1 + A3 d^0.3; fits A1, A3.
    PowerLaw,
}

impl FitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FitFamily::ExactParasitic { .. } => "exact-parasitic",
            FitFamily::PfaParasitic { .. } => "pfa-parasitic",
            FitFamily::ModifiedLens { .. } => "modified",
            FitFamily::IdealLog { .. } => "ideallog",
            FitFamily::PowerLaw => "powerlaw",
        }
    }

    /// (name, SI unit) of each linear parameter.
    pub fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            FitFamily::ExactParasitic { .. } | FitFamily::PfaParasitic { .. } => {
                &[("A1", "F"), ("A2", "F/m")]
            }
            FitFamily::ModifiedLens { .. } => &[("C_tilde", "F")],
            FitFamily::IdealLog { .. } => &[("A1_id", "F"), ("A3_id", "F")],
            FitFamily::PowerLaw => &[("A1_mod", "F"), ("A3_mod", "F*m^-0.3")],
        }
    }

    /// Fixed part of the model and the design row at separation `d`.
    fn row(&self, d: f64) -> Result<(f64, Vec<f64>)> {
        Ok(match self {
            FitFamily::ExactParasitic { geometry } => {
                (exact_capacitance(d, geometry)?, vec![1.0, -d])
            }
            FitFamily::PfaParasitic { geometry } => (pfa_capacitance(d, geometry)?, vec![1.0, -d]),
            FitFamily::ModifiedLens { geometry } => {
                (modified_capacitance(d, geometry, 0.0)?, vec![1.0])
            }
            FitFamily::IdealLog { geometry } => (0.0, vec![1.0, (geometry.radius() / d).ln()]),
            FitFamily::PowerLaw => (0.0, vec![1.0, d.powf(0.3)]),
        })
    }

    /// The concrete model with fitted values substituted.
    pub fn model(&self, params: &[f64]) -> CapacitanceModelSpec {
        match *self {
            FitFamily::ExactParasitic { geometry } => CapacitanceModelSpec::with_parasitic(
                ModelKind::ExactSphere { geometry },
                ParasiticParams {
                    a1: params[0],
                    a2: params[1],
                },
            ),
            FitFamily::PfaParasitic { geometry } => CapacitanceModelSpec::with_parasitic(
                ModelKind::PfaLeading { geometry },
                ParasiticParams {
                    a1: params[0],
                    a2: params[1],
                },
            ),
            FitFamily::ModifiedLens { geometry } => ModelKind::ModifiedLens {
                geometry,
                c_tilde: params[0],
            }
            .into(),
            FitFamily::IdealLog { geometry } => ModelKind::IdealLog {
                a1: params[0],
                a3: params[1],
                geometry,
            }
            .into(),
            FitFamily::PowerLaw => ModelKind::PowerLaw {
                a1: params[0],
                a3: params[1],
            }
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    /// 1σ
    pub sigma: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: CapacitanceModelSpec,
    pub params: Vec<FitParam>,
    pub chi2: f64,
    pub dof: usize,
    pub reduced_chi2: f64,
    pub p_value: f64,
    pub excluded_points: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<&FitParam> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Value of a named parameter; panics if absent.
    pub fn value(&self, name: &str) -> f64 {
        self.param(name)
            .unwrap_or_else(|| panic!("fit has no parameter '{name}'"))
            .value
    }

    pub fn sigma(&self, name: &str) -> f64 {
        self.param(name)
            .unwrap_or_else(|| panic!("fit has no parameter '{name}'"))
            .sigma
    }
}

struct LinearSolve {
    params: Vec<f64>,
    covariance: DMatrix<f64>,
    model: CapacitanceModelSpec,
    /// canonical-order (point index, separation) of included points
    used: Vec<(usize, f64)>,
    chi2: f64,
    excluded: usize,
}

fn solve_linear(
    ds: &Dataset,
    family: &FitFamily,
    calib: Option<&PiezoCalibration>,
) -> Result<LinearSolve> {
    let seps = separations(ds, calib)?;
    let used: Vec<(usize, f64)> = seps
        .iter()
        .filter_map(|&(i, d)| d.map(|d| (i, d)))
        .collect();
    let excluded = seps.len() - used.len();
    if used.is_empty() {
        return Err(Error::EmptyObjective { excluded });
    }
    let names = family.parameters();
    let p = names.len();
    if used.len() <= p {
        return Err(Error::Invalid(format!(
            "{} usable points cannot constrain {p} parameters with positive degrees of freedom",
            used.len()
        )));
    }

    let n = used.len();
    let mut design = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let mut sigma = DVector::zeros(n);
    for (row, &(i, d)) in used.iter().enumerate() {
        let (fixed, cols) = family.row(d)?;
        for (j, v) in cols.into_iter().enumerate() {
            design[(row, j)] = v;
        }
        let m = &ds.points[i];
        y[row] = m.capacitance - fixed;
        sigma[row] = m.sigma;
    }

    let sol = weighted_linear_least_squares(&design, &y, &sigma).map_err(|e| match e {
        Error::Singular { column, .. } => Error::Singular {
            column,
            name: names[column].0.to_string(),
        },
        other => other,
    })?;
    let params: Vec<f64> = sol.params.iter().copied().collect();
    let model = family.model(&params);
    let chi2 = chi_squared(ds, &model, calib)?.chi2;
    Ok(LinearSolve {
        params,
        covariance: sol.covariance,
        model,
        used,
        chi2,
        excluded,
    })
}

fn finish(
    model: CapacitanceModelSpec,
    params: Vec<FitParam>,
    chi2: f64,
    included: usize,
    excluded: usize,
) -> Result<FitResult> {
    let dof = included - params.len();
    Ok(FitResult {
        model,
        chi2,
        dof,
        reduced_chi2: chi2 / dof as f64,
        p_value: chi2_p_value(chi2, dof)?,
        excluded_points: excluded,
        params,
    })
}

/// Weighted least-squares fit of a linear family.
///
/// Points whose separation is not positive are skipped and counted in
/// `excluded_points`. Parameter uncertainties are the square roots of the
/// covariance diagonal.
pub fn fit_linear(
    ds: &Dataset,
    family: &FitFamily,
    calib: Option<&PiezoCalibration>,
) -> Result<FitResult> {
    let s = solve_linear(ds, family, calib)?;
    let params = family
        .parameters()
        .iter()
        .enumerate()
        .map(|(j, &(name, unit))| FitParam {
            name: name.to_string(),
            value: s.params[j],
            sigma: s.covariance[(j, j)].max(0.0).sqrt(),
            unit: unit.to_string(),
        })
        .collect();
    finish(s.model, params, s.chi2, s.used.len(), s.excluded)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Search interval for V⁰; defaults to [max V - 5, max V + 10].
    pub bounds: Option<(f64, f64)>,
    pub tol: f64,
    /// Step of the second difference used for the V⁰ uncertainty;
    /// defaults to 1e-4 of the bracket width.
    pub curvature_step: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            bounds: None,
            tol: DEFAULT_TOL,
            curvature_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactVoltageFit {
    /// Linear parameters followed by `V0_PZT`.
    pub fit: FitResult,
    pub beta: f64,
    pub bounds: (f64, f64),
    pub converged: bool,
    pub boundary_pinned: bool,
    /// Every (V⁰, χ²) the minimizer evaluated, in order.
    pub trace: Vec<(f64, f64)>,
    /// d²χ²/dV⁰² at the minimum.
    pub curvature: f64,
}

/// Fit with V⁰_PZT free: χ² is profiled over V⁰ by Brent's method, with the
/// linear parameters solved exactly at every candidate.
///
/// σ(V⁰) = sqrt(2 / χ''), from the profile curvature. The linear parameters
/// get marginal uncertainties from the Gauss-Newton covariance of the full
/// parameter set, so their correlation with V⁰ is included.
pub fn fit_with_contact_voltage(
    ds: &Dataset,
    family: &FitFamily,
    beta: f64,
    opts: &ProfileOptions,
) -> Result<ContactVoltageFit> {
    if ds.kind != AbscissaKind::PiezoVoltage {
        return Err(Error::Invalid(format!(
            "dataset '{}' is indexed by separation; a contact-voltage fit needs piezo voltages",
            ds.label
        )));
    }
    PiezoCalibration::new(beta, 0.0)?;
    let bounds = opts.bounds.unwrap_or_else(|| {
        let vmax = ds
            .points
            .iter()
            .map(|p| p.x)
            .fold(f64::NEG_INFINITY, f64::max);
        (vmax - 5.0, vmax + 10.0)
    });
    let (lo, hi) = bounds;

    let mut trace = Vec::new();
    let profile = |v0: f64| -> Result<f64> {
        let calib = PiezoCalibration { beta, v0_pzt: v0 };
        Ok(solve_linear(ds, family, Some(&calib))?.chi2)
    };
    let min = minimize_scalar(
        |v0| {
            let chi2 = profile(v0)?;
            trace.push((v0, chi2));
            Ok(chi2)
        },
        lo,
        hi,
        opts.tol,
    )?;

    let v0 = min.x;
    let calib = PiezoCalibration { beta, v0_pzt: v0 };
    let s = solve_linear(ds, family, Some(&calib))?;

    let h = opts.curvature_step.unwrap_or(1e-4 * (hi - lo));
    let curvature = central_second_derivative(profile, v0, h)?;
    let v0_sigma = if curvature > 0.0 {
        (2.0 / curvature).sqrt()
    } else {
        f64::NAN
    };

    // Gauss-Newton covariance over (linear params, V0)
    let p = s.params.len();
    let n = s.used.len();
    let mut jac = DMatrix::zeros(n, p + 1);
    let mut sig = DVector::zeros(n);
    for (row, &(i, d)) in s.used.iter().enumerate() {
        let (_, cols) = family.row(d)?;
        for (j, v) in cols.into_iter().enumerate() {
            jac[(row, j)] = v;
        }
        // dC/dV0 = dC/dd * beta = -2 F_norm(d) beta
        jac[(row, p)] = -2.0 * s.model.force_norm(d)? * beta;
        sig[row] = ds.points[i].sigma;
    }
    let linear_sigmas: Vec<f64> =
        match weighted_linear_least_squares(&jac, &DVector::zeros(n), &sig) {
            Ok(gn) => (0..p)
                .map(|j| gn.covariance[(j, j)].max(0.0).sqrt())
                .collect(),
            Err(_) => (0..p)
                .map(|j| s.covariance[(j, j)].max(0.0).sqrt())
                .collect(),
        };

    let mut params: Vec<FitParam> = family
        .parameters()
        .iter()
        .enumerate()
        .map(|(j, &(name, unit))| FitParam {
            name: name.to_string(),
            value: s.params[j],
            sigma: linear_sigmas[j],
            unit: unit.to_string(),
        })
        .collect();
    params.push(FitParam {
        name: "V0_PZT".into(),
        value: v0,
        sigma: v0_sigma,
        unit: "V".into(),
    });

    let edge = (100.0 * opts.tol).max(1e-9 * (hi - lo));
    let boundary_pinned = v0 - lo <= edge || hi - v0 <= edge;
    let converged = min.converged && !boundary_pinned && curvature > 0.0;
    if !converged {
        log::warn!(
            "contact-voltage fit did not converge cleanly (pinned: {boundary_pinned}, curvature: {curvature:e}, minimizer converged: {})",
            min.converged
        );
    }

    let fit = finish(s.model, params, s.chi2, n, s.excluded)?;
    Ok(ContactVoltageFit {
        fit,
        beta,
        bounds,
        converged,
        boundary_pinned,
        trace,
        curvature,
    })
}
