use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use capcal::calibration::{
    fit_linear, fit_with_contact_voltage, generate_synthetic, linear_design, uncertainty_report,
    AbscissaKind, Dataset, FitReport, PiezoCalibration, ProfileOptions, ReportInputs, SigmaSpec,
    SynthSidecar, SynthSpec,
};
use capcal::physics::{
    effective_exponent, exact_capacitance, exact_force_norm, expansion_capacitance,
    expansion_force_norm, modified_capacitance, modified_capacitance_large,
    modified_capacitance_small, pfa_capacitance, pfa_force_norm, CapacitanceModelSpec,
    ExpansionCoefficients, ExpansionMode, ParasiticParams, SphereGeometry, ThetaParameter,
    SERIES_REL_TOL,
};
use capcal::units::{NM, PF, PF_PER_M, UM};

use crate::args::{CurvesArgs, EvalArgs, ExponentArgs, FitArgs, Format, SynthArgs, TableArgs};
use crate::output::{emit, resolve, sig, write_atomic};
use crate::{Failure, EXIT_NOT_CONVERGED};

fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Failure::usage(format!(
            "range [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    if n < 2 {
        return Err(Failure::usage(format!("need at least 2 samples, got {n}")));
    }
    let r = (hi / lo).ln();
    Ok((0..n)
        .map(|i| lo * (r * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn at_separation(model: &str, d: f64) -> impl Fn(capcal::Error) -> Failure + '_ {
    move |e| Failure::from(e).context(format!("model {model} at d = {} nm", d / NM))
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn eval(a: &EvalArgs, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let spec = a.model.spec(None)?;
    let name = spec.model.name();

    let mut points: Vec<(Option<f64>, f64)> = Vec::new();
    points.extend(a.d_um.iter().map(|&d| (None, d * UM)));
    points.extend(a.d_nm.iter().map(|&d| (None, d * NM)));
    if let Some(r) = &a.range_nm {
        points.extend(
            log_spaced(r[0], r[1], a.samples)?
                .into_iter()
                .map(|d| (None, d * NM)),
        );
    }
    if !a.v_pzt.is_empty() {
        let calib = a
            .piezo
            .calibration()?
            .ok_or_else(|| Failure::usage("--v-pzt needs --beta-nm-per-V and --v0-pzt"))?;
        points.extend(a.v_pzt.iter().map(|&v| (Some(v), calib.separation(v))));
    }
    if points.is_empty() {
        return Err(Failure::usage(
            "no separations given: use --d-um, --d-nm, --range-nm or --v-pzt",
        ));
    }

    let mut rows = Vec::with_capacity(points.len());
    for &(v, d) in &points {
        let c = spec.capacitance(d).map_err(at_separation(name, d))?;
        let f = spec.force_norm(d).map_err(at_separation(name, d))?;
        rows.push((v, d, c / PF, f / PF_PER_M));
    }
    let with_v = rows.iter().any(|r| r.0.is_some());

    let text = match format {
        Format::Text => {
            let mut s = format!("model: {name}\n");
            for &(v, d, c, f) in &rows {
                if let Some(v) = v {
                    let _ = write!(s, "V_PZT = {v} V, ");
                }
                let _ = writeln!(
                    s,
                    "d = {} nm: C = {} pF, -F/(V-V0)^2 = {} pF/m",
                    sig(d / NM, 10),
                    sig(c, 10),
                    sig(f, 10)
                );
            }
            s
        }
        Format::Csv => {
            let mut s = String::new();
            if with_v {
                s.push_str("v_pzt_V,");
            }
            s.push_str("d_nm,C_pF,force_norm_pF_per_m\n");
            for &(v, d, c, f) in &rows {
                if with_v {
                    let _ = write!(s, "{},", v.map_or(String::new(), |v| v.to_string()));
                }
                let _ = writeln!(s, "{},{c},{f}", d / NM);
            }
            s
        }
        Format::Json => json_text(&json!({
            "model": spec,
            "points": rows.iter().map(|&(v, d, c, f)| json!({
                "v_pzt_V": v,
                "d_nm": d / NM,
                "C_pF": c,
                "force_norm_pF_per_m": f,
            })).collect::<Vec<_>>(),
        })),
    };
    emit(out, &text)?;
    Ok(0)
}

const TABLE_COLUMNS: [&str; 7] = [
    "d_um",
    "C_exact_pF",
    "C_pfa_pF",
    "C_expansion_pF",
    "F_exact_pF_per_m",
    "F_pfa_pF_per_m",
    "F_expansion_pF_per_m",
];

pub fn table(a: &TableArgs, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let geom = SphereGeometry::from_um(a.r_um).map_err(|e| Failure::usage(e.to_string()))?;
    let theta = ThetaParameter::new(a.theta).map_err(|e| Failure::usage(e.to_string()))?;
    let coeffs = ExpansionCoefficients::standard();
    let mode = if a.table_compat {
        ExpansionMode::TableCompat
    } else {
        ExpansionMode::AsPrinted
    };

    let mut rows = Vec::with_capacity(a.d_um.len());
    for &d_um in &a.d_um {
        let d = d_um * UM;
        let row = [
            exact_capacitance(d, &geom).map_err(at_separation("exact", d))? / PF,
            pfa_capacitance(d, &geom).map_err(at_separation("pfa", d))? / PF,
            expansion_capacitance(d, &geom, theta, &coeffs, mode)
                .map_err(at_separation("expansion", d))?
                / PF,
            exact_force_norm(d, &geom).map_err(at_separation("exact", d))? / PF_PER_M,
            pfa_force_norm(d, &geom).map_err(at_separation("pfa", d))? / PF_PER_M,
            expansion_force_norm(d, &geom, &coeffs).map_err(at_separation("expansion", d))?
                / PF_PER_M,
        ];
        rows.push((d_um, row));
    }

    let text = match format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:>6} {:>11} {:>11} {:>11} {:>12} {:>12} {:>12}",
                "d(um)", "C exact", "C PFA", "C expan.", "F exact", "F PFA", "F expan."
            );
            for (d_um, r) in &rows {
                let d = if (d_um * 10.0).fract() == 0.0 {
                    format!("{d_um:.1}")
                } else {
                    d_um.to_string()
                };
                let _ = writeln!(
                    s,
                    "{d:>6} {:>11.5} {:>11.5} {:>11.5} {:>12} {:>12} {:>12}",
                    r[0],
                    r[1],
                    r[2],
                    sig(r[3], 6),
                    sig(r[4], 6),
                    sig(r[5], 6)
                );
            }
            s
        }
        Format::Csv => {
            let mut s = TABLE_COLUMNS.join(",");
            s.push('\n');
            for (d_um, r) in &rows {
                let _ = writeln!(
                    s,
                    "{d_um},{},{},{},{},{},{}",
                    r[0], r[1], r[2], r[3], r[4], r[5]
                );
            }
            s
        }
        Format::Json => json_text(&json!({
            "R_um": a.r_um,
            "theta": a.theta,
            "table_compat": a.table_compat,
            "rows": rows.iter().map(|(d_um, r)| {
                let mut m = serde_json::Map::new();
                m.insert(TABLE_COLUMNS[0].into(), json!(d_um));
                for (k, v) in TABLE_COLUMNS[1..].iter().zip(r) {
                    m.insert((*k).into(), json!(v));
                }
                serde_json::Value::Object(m)
            }).collect::<Vec<_>>(),
        })),
    };
    emit(out, &text)?;
    Ok(0)
}

pub fn curves(a: &CurvesArgs, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let geom = a.lens.geometry(&a.sphere)?;
    let c_tilde = a.c_tilde_pf * PF;
    let ds = log_spaced(a.from_nm, a.to_nm, a.samples)?;
    let mut rows = Vec::with_capacity(ds.len());
    for d_nm in ds {
        let d = d_nm * NM;
        rows.push([
            d_nm,
            modified_capacitance(d, &geom, c_tilde).map_err(at_separation("modified", d))? / PF,
            modified_capacitance_small(d, &geom).map_err(at_separation("modified-small", d))? / PF,
            modified_capacitance_large(d, &geom, c_tilde)
                .map_err(at_separation("modified-large", d))?
                / PF,
        ]);
    }
    let header = ["d_nm", "C_mod_pF", "C_small_pF", "C_large_pF"];
    let text = match format {
        Format::Text => {
            let mut s = format!(
                "{:>12} {:>16} {:>16} {:>16}\n",
                header[0], header[1], header[2], header[3]
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>12} {:>16} {:>16} {:>16}",
                    sig(r[0], 6),
                    sig(r[1], 10),
                    sig(r[2], 10),
                    sig(r[3], 10)
                );
            }
            s
        }
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r[0], r[1], r[2], r[3]);
            }
            s
        }
        Format::Json => json_text(&json!({
            "geometry": geom,
            "c_tilde_pF": a.c_tilde_pf,
            "columns": header,
            "rows": rows,
        })),
    };
    emit(out, &text)?;
    Ok(0)
}

pub fn fit(a: &FitArgs, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let ds =
        Dataset::read_csv(&a.dataset).map_err(|e| Failure::from(e).context(a.dataset.display()))?;
    let family = a.family()?;
    let mut inputs = ReportInputs {
        tolerances: vec![("series_rel_tol".into(), SERIES_REL_TOL)],
        ..Default::default()
    };

    let mut code = 0;
    let report = match (ds.kind, a.piezo.beta_nm_v, a.piezo.v0_pzt) {
        (AbscissaKind::Separation, beta, v0) => {
            if beta.is_some() || v0.is_some() {
                log::warn!("dataset is indexed by separation; piezo flags ignored");
            }
            uncertainty_report(&fit_linear(&ds, &family, None)?, inputs)
        }
        (AbscissaKind::PiezoVoltage, Some(beta), Some(v0)) => {
            let calib =
                PiezoCalibration::new(beta * NM, v0).map_err(|e| Failure::usage(e.to_string()))?;
            inputs.beta = Some(calib.beta);
            uncertainty_report(&fit_linear(&ds, &family, Some(&calib))?, inputs)
        }
        (AbscissaKind::PiezoVoltage, Some(beta), None) => {
            let opts = ProfileOptions {
                bounds: a.v0_min.zip(a.v0_max),
                tol: a.tol,
                curvature_step: None,
            };
            inputs.tolerances.push(("profile_tol".into(), a.tol));
            let cv = fit_with_contact_voltage(&ds, &family, beta * NM, &opts)?;
            if !cv.converged || cv.boundary_pinned {
                log::error!(
                    "V0 search did not converge to an interior minimum in [{}, {}] V",
                    cv.bounds.0,
                    cv.bounds.1
                );
                code = EXIT_NOT_CONVERGED;
            }
            FitReport::from_profile(&cv, inputs)
        }
        (AbscissaKind::PiezoVoltage, None, _) => return Err(Failure::usage(
            "piezo-voltage dataset needs --beta-nm-per-V (and --v0-pzt to fix the contact voltage)",
        )),
    };

    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("name,value,sigma,unit\n");
            for p in &report.fit.params {
                let _ = writeln!(s, "{},{},{},{}", p.name, p.value, p.sigma, p.unit);
            }
            let f = &report.fit;
            let _ = writeln!(s, "chi2,{},,", f.chi2);
            let _ = writeln!(s, "dof,{},,", f.dof);
            let _ = writeln!(s, "reduced_chi2,{},,", f.reduced_chi2);
            let _ = writeln!(s, "p_value,{},,", f.p_value);
            s
        }
    };
    emit(out, &text)?;
    Ok(code)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("synth.json")
}

pub fn synth(a: &SynthArgs, out: Option<&Path>) -> Result<u8, Failure> {
    let default_parasitic = (!a.no_parasitic).then(ParasiticParams::mto_fit);
    let truth: CapacitanceModelSpec = a.model.spec(default_parasitic)?;
    let name = truth.model.name();

    let (kind, abscissae, calib) = match &a.v_pzt_range {
        Some(r) => {
            let calib = a.piezo.calibration()?.ok_or_else(|| {
                Failure::usage("--v-pzt-range needs --beta-nm-per-V and --v0-pzt")
            })?;
            (
                AbscissaKind::PiezoVoltage,
                linear_design(r[0], r[1], a.points),
                Some(calib),
            )
        }
        None => (
            AbscissaKind::Separation,
            linear_design(a.from_nm * NM, a.to_nm * NM, a.points),
            None,
        ),
    };
    if abscissae.is_empty() {
        return Err(Failure::usage("design needs at least one point"));
    }
    if !(a.sigma_pf >= 0.0 && a.sigma_pf.is_finite()) {
        return Err(Failure::usage(format!(
            "--sigma-pF = {} must be >= 0",
            a.sigma_pf
        )));
    }
    for &x in &abscissae {
        let d = calib.map_or(x, |c| c.separation(x));
        truth.capacitance(d).map_err(at_separation(name, d))?;
    }

    let add_noise = a.sigma_pf > 0.0;
    let recorded = if add_noise {
        a.sigma_pf
    } else {
        a.weight_sigma_pf
    };
    let spec = SynthSpec {
        truth,
        kind,
        abscissae,
        calib,
        sigma: SigmaSpec::Homoscedastic(recorded * PF),
        seed: a.seed,
        add_noise,
    };
    let ds = generate_synthetic(&spec)?;

    let path = resolve(out.unwrap_or(Path::new("synthetic.csv")));
    write_atomic(&path, &ds.to_csv())?;
    let side = sidecar_path(&path);
    let mut sidecar = SynthSidecar::new(spec).to_json();
    sidecar.push('\n');
    write_atomic(&side, &sidecar)?;
    log::info!("wrote {} and {}", path.display(), side.display());
    Ok(0)
}

pub fn exponent(a: &ExponentArgs, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let spec = a.model.spec(None)?;
    let name = spec.model.name();
    if !(a.from_nm > 0.0 && a.to_nm > a.from_nm) {
        return Err(Failure::usage(format!(
            "range [{}, {}] nm must satisfy 0 < from < to",
            a.from_nm, a.to_nm
        )));
    }
    let res = effective_exponent(&spec, a.from_nm * NM, a.to_nm * NM, a.points).map_err(|e| {
        Failure::from(e).context(format!("model {name} over [{}, {}] nm", a.from_nm, a.to_nm))
    })?;
    // |d(-F/(V-V0)^2)/dd| in pF/m per nm
    let grads: Vec<(f64, f64)> = res
        .separations
        .iter()
        .zip(&res.gradients)
        .map(|(&d, &g)| (d / NM, g / PF_PER_M * NM))
        .collect();

    let text = match format {
        Format::Text => {
            let mut s = format!(
                "model: {name}\neffective exponent over [{}, {}] nm: {:.6}\n{:>12} {:>18}\n",
                a.from_nm, a.to_nm, res.exponent, "d_nm", "grad_pF_per_m_nm"
            );
            for (d, g) in &grads {
                let _ = writeln!(s, "{:>12} {:>18}", sig(*d, 6), sig(*g, 8));
            }
            s
        }
        Format::Csv => {
            let mut s = format!("# exponent={}\nd_nm,grad_pF_per_m_nm\n", res.exponent);
            for (d, g) in &grads {
                let _ = writeln!(s, "{d},{g}");
            }
            s
        }
        Format::Json => json_text(&json!({
            "model": spec,
            "from_nm": a.from_nm,
            "to_nm": a.to_nm,
            "exponent": res.exponent,
            "points": grads.iter().map(|(d, g)| json!({"d_nm": d, "grad_pF_per_m_nm": g})).collect::<Vec<_>>(),
        })),
    };
    emit(out, &text)?;
    Ok(0)
}
