//! Fit reports: a stable JSON document plus a plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::fit::{ContactVoltageFit, FitParam, FitResult};
use super::synth::{SynthSpec, GENERATOR_ID};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub capcal: String,
    pub generator: String,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            capcal: env!("CARGO_PKG_VERSION").to_string(),
            generator: GENERATOR_ID.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    /// m/V; fixed, its uncertainty is not propagated.
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub seed: Option<u64>,
    /// Named numerical tolerances used by the fit.
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDiagnostics {
    pub converged: bool,
    pub boundary_pinned: bool,
    pub bounds: (f64, f64),
    pub curvature: f64,
    pub trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(flatten)]
    pub fit: FitResult,
    pub inputs: ReportInputs,
    pub versions: Versions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDiagnostics>,
}

/// Record of how a synthetic dataset was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSidecar {
    pub synth: SynthSpec,
    pub versions: Versions,
}

impl SynthSidecar {
    pub fn new(synth: SynthSpec) -> Self {
        Self {
            synth,
            versions: Versions::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }
}

/// Wraps a fit into a report.
pub fn uncertainty_report(fit: &FitResult, inputs: ReportInputs) -> FitReport {
    FitReport {
        fit: fit.clone(),
        inputs,
        versions: Versions::default(),
        profile: None,
    }
}

impl FitReport {
    pub fn from_profile(cv: &ContactVoltageFit, mut inputs: ReportInputs) -> Self {
        inputs.beta = Some(cv.beta);
        FitReport {
            fit: cv.fit.clone(),
            inputs,
            versions: Versions::default(),
            profile: Some(ProfileDiagnostics {
                converged: cv.converged,
                boundary_pinned: cv.boundary_pinned,
                bounds: cv.bounds,
                curvature: cv.curvature,
                trace: cv.trace.clone(),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let f = &self.fit;
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", f.model.model.name());
        for p in &f.params {
            let _ = writeln!(out, "  {}", format_param(p));
        }
        let _ = writeln!(out, "chi2          = {:.15e}", f.chi2);
        let _ = writeln!(out, "dof           = {}", f.dof);
        let _ = writeln!(out, "reduced chi2  = {:.15e}", f.reduced_chi2);
        let _ = writeln!(out, "p-value       = {:.6}", f.p_value);
        let _ = writeln!(out, "excluded pts  = {}", f.excluded_points);
        if let Some(b) = self.inputs.beta {
            let _ = writeln!(out, "beta          = {} nm/V (fixed)", b / crate::units::NM);
        }
        if let Some(t) = self.inputs.theta {
            let _ = writeln!(out, "theta         = {t}");
        }
        if let Some(s) = self.inputs.seed {
            let _ = writeln!(out, "seed          = {s}");
        }
        if let Some(p) = &self.profile {
            let _ = writeln!(
                out,
                "profile       : converged={} pinned={} bounds=[{}, {}] V evaluations={}",
                p.converged,
                p.boundary_pinned,
                p.bounds.0,
                p.bounds.1,
                p.trace.len()
            );
        }
        out
    }
}

/// SI value → (scale, display unit).
fn display_unit(unit: &str) -> (f64, &str) {
    match unit {
        "F" => (1e12, "pF"),
        "F/m" => (1e6, "pF/um"),
        "F*m^-0.3" => (1e12, "pF*m^-0.3"),
        other => (1.0, other),
    }
}

fn format_param(p: &FitParam) -> String {
    let (scale, unit) = display_unit(&p.unit);
    let (v, s) = (p.value * scale, p.sigma * scale);
    if s.is_finite() && s > 0.0 {
        let decimals = (2 - s.log10().floor() as i32).clamp(0, 15) as usize;
        format!("{:<8} = {v:.decimals$} +/- {s:.decimals$} {unit}", p.name)
    } else {
        format!("{:<8} = {v:e} +/- {s} {unit}", p.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{CapacitanceModelSpec, ModelKind, ParasiticParams, SphereGeometry};

    fn sample_fit() -> FitResult {
        FitResult {
            model: CapacitanceModelSpec::with_parasitic(
                ModelKind::ExactSphere {
                    geometry: SphereGeometry::mto_sphere(),
                },
                ParasiticParams::mto_fit(),
            ),
            params: vec![
                FitParam {
                    name: "A1".into(),
                    value: 72.329_71e-12,
                    sigma: 2.0e-17,
                    unit: "F".into(),
                },
                FitParam {
                    name: "A2".into(),
                    value: 2.18e-10,
                    sigma: 1.0e-11,
                    unit: "F/m".into(),
                },
            ],
            chi2: 244.3,
            dof: 349,
            reduced_chi2: 244.3 / 349.0,
            p_value: 0.999_99,
            excluded_points: 0,
        }
    }

    #[test]
    fn json_round_trip() {
        let r = uncertainty_report(
            &sample_fit(),
            ReportInputs {
                seed: Some(42),
                tolerances: vec![("series_rel_tol".into(), 1e-13)],
                ..Default::default()
            },
        );
        let back = FitReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.fit, sample_fit());
    }

    #[test]
    fn stable_field_names() {
        let r = uncertainty_report(&sample_fit(), ReportInputs::default());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "model",
            "params",
            "chi2",
            "dof",
            "reduced_chi2",
            "p_value",
            "excluded_points",
            "inputs",
            "versions",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["name", "value", "sigma", "unit"] {
            assert!(v["params"][0].get(key).is_some(), "missing params.{key}");
        }
        for key in ["beta", "theta", "seed", "tolerances"] {
            assert!(v["inputs"].get(key).is_some(), "missing inputs.{key}");
        }
    }

    #[test]
    fn text_rendering() {
        let r = uncertainty_report(&sample_fit(), ReportInputs::default());
        let text = r.to_text();
        assert!(
            text.contains("A1       = 72.3297100 +/- 0.0000200 pF"),
            "{text}"
        );
        assert!(text.contains("pF/um"));
        let line = text
            .lines()
            .find(|l| l.starts_with("reduced chi2"))
            .unwrap();
        let printed: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
        assert!((printed - 244.3 / 349.0).abs() <= 1e-12 * printed);
    }
}
