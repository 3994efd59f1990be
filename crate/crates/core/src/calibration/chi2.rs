use super::dataset::{AbscissaKind, Dataset};
use super::piezo::PiezoCalibration;
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::physics::CapacitanceModelSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Value {
    pub chi2: f64,
    pub included: usize,
    /// Points dropped because their separation was not positive.
    pub excluded: usize,
}

/// Separations of all points in canonical order, `None` where the point is
/// excluded.
pub(crate) fn separations(
    ds: &Dataset,
    calib: Option<&PiezoCalibration>,
) -> Result<Vec<(usize, Option<f64>)>> {
    let calib = match (ds.kind, calib) {
        (AbscissaKind::PiezoVoltage, None) => {
            return Err(Error::Invalid(format!(
                "dataset '{}' is indexed by piezo voltage; a piezo calibration is required",
                ds.label
            )))
        }
        (AbscissaKind::PiezoVoltage, Some(c)) => Some(c),
        (AbscissaKind::Separation, _) => None,
    };
    Ok(ds
        .canonical_order()
        .into_iter()
        .map(|i| {
            let x = ds.points[i].x;
            let d = match calib {
                Some(c) => c.separation(x),
                None => x,
            };
            (i, (d > 0.0).then_some(d))
        })
        .collect())
}

/// Σ [(C_i - C_model(d_i)) / σ_i]^2 over points with positive separation.
pub fn chi_squared(
    ds: &Dataset,
    spec: &CapacitanceModelSpec,
    calib: Option<&PiezoCalibration>,
) -> Result<Chi2Value> {
    let seps = separations(ds, calib)?;
    let mut acc = NeumaierSum::new();
    let mut included = 0usize;
    for &(i, d) in &seps {
        let Some(d) = d else { continue };
        let p = &ds.points[i];
        let r = (p.capacitance - spec.capacitance(d)?) / p.sigma;
        acc.add(r * r);
        included += 1;
    }
    let excluded = seps.len() - included;
    if included == 0 {
        return Err(Error::EmptyObjective { excluded });
    }
    Ok(Chi2Value {
        chi2: acc.value(),
        included,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::dataset::Measurement;
    use crate::physics::{ModelKind, ParasiticParams, SphereGeometry};
    use proptest::prelude::*;

    fn constant_model(c: f64) -> CapacitanceModelSpec {
        // zero-slope power law is a constant
        ModelKind::PowerLaw { a1: c, a3: 0.0 }.into()
    }

    #[test]
    fn exact_model_gives_zero() {
        let spec = CapacitanceModelSpec::with_parasitic(
            ModelKind::ExactSphere {
                geometry: SphereGeometry::mto_sphere(),
            },
            ParasiticParams::mto_fit(),
        );
        let pts = (1..10)
            .map(|i| {
                let d = i as f64 * 0.4e-6;
                Measurement::new(d, spec.capacitance(d).unwrap(), 2e-16).unwrap()
            })
            .collect();
        let ds = Dataset::new(AbscissaKind::Separation, pts, "").unwrap();
        assert_eq!(chi_squared(&ds, &spec, None).unwrap().chi2, 0.0);
    }

    #[test]
    fn one_sigma_residual() {
        let ds = Dataset::new(
            AbscissaKind::Separation,
            vec![Measurement::new(1e-6, 3e-12, 0.5e-12).unwrap()],
            "",
        )
        .unwrap();
        let v = chi_squared(&ds, &constant_model(2.5e-12), None).unwrap();
        assert!((v.chi2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed() {
        // residuals/sigma: (1-2)/0.5 = -2, (4-2)/1 = 2, (2.5-2)/0.25 = 2
        let pts = vec![
            Measurement::new(1e-6, 1.0, 0.5).unwrap(),
            Measurement::new(2e-6, 4.0, 1.0).unwrap(),
            Measurement::new(3e-6, 2.5, 0.25).unwrap(),
        ];
        let ds = Dataset::new(AbscissaKind::Separation, pts, "").unwrap();
        let v = chi_squared(&ds, &constant_model(2.0), None).unwrap();
        assert!((v.chi2 - 12.0).abs() < 1e-14);
    }

    #[test]
    fn excludes_non_positive_separations() {
        let calib = PiezoCalibration::new(87e-9, 68.43).unwrap();
        let volts = [10.0, 40.0, 68.0, 68.43, 68.5, 68.76];
        let pts = volts
            .iter()
            .map(|&v| Measurement::new(v, 200e-12, 1e-15).unwrap())
            .collect();
        let ds = Dataset::new(AbscissaKind::PiezoVoltage, pts, "").unwrap();
        let spec: CapacitanceModelSpec = ModelKind::IdealLog {
            a1: 199.3e-12,
            a3: 1.719e-12,
            geometry: SphereGeometry::new(30.9e-3).unwrap(),
        }
        .into();
        let v = chi_squared(&ds, &spec, Some(&calib)).unwrap();
        assert_eq!(v.excluded, 3);
        assert_eq!(v.included, 3);
        assert!(chi_squared(&ds, &spec, None).is_err());
    }

    #[test]
    fn all_excluded_is_an_error() {
        let calib = PiezoCalibration::new(87e-9, 1.0).unwrap();
        let ds = Dataset::new(
            AbscissaKind::PiezoVoltage,
            vec![Measurement::new(2.0, 1e-12, 1e-15).unwrap()],
            "",
        )
        .unwrap();
        let err = chi_squared(&ds, &constant_model(0.0), Some(&calib)).unwrap_err();
        assert_eq!(err, Error::EmptyObjective { excluded: 1 });
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            rows in proptest::collection::vec((0.1f64..5.0, -1.0f64..1.0, 0.01f64..1.0), 1..30),
            seed in any::<u64>(),
        ) {
            let pts: Vec<Measurement> = rows.iter()
                .map(|&(x, c, s)| Measurement::new(x * 1e-6, c, s).unwrap())
                .collect();
            let mut shuffled = pts.clone();
            // deterministic Fisher-Yates driven by the seed
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let spec = constant_model(0.1);
            let a = chi_squared(&Dataset::new(AbscissaKind::Separation, pts, "").unwrap(), &spec, None).unwrap();
            let b = chi_squared(&Dataset::new(AbscissaKind::Separation, shuffled, "").unwrap(), &spec, None).unwrap();
            prop_assert_eq!(a.chi2.to_bits(), b.chi2.to_bits());
        }
    }
}
