//! Seeded synthetic datasets.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::{AbscissaKind, Dataset, Measurement};
use super::piezo::PiezoCalibration;
use crate::error::{Error, Result};
use crate::physics::CapacitanceModelSpec;

/// Names the noise stream so a dataset can be regenerated bit for bit.
pub const GENERATOR_ID: &str =
    "ChaCha20Rng::seed_from_u64 (rand_chacha 0.9) + StandardNormal ziggurat (rand_distr 0.5)";

/// Capacitance uncertainty of the torsional-oscillator measurements, F.
pub const MTO_SIGMA: f64 = 2e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSpec {
    Homoscedastic(f64),
    PerPoint(Vec<f64>),
}

impl SigmaSpec {
    fn at(&self, i: usize) -> f64 {
        match self {
            SigmaSpec::Homoscedastic(s) => *s,
            SigmaSpec::PerPoint(v) => v[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub truth: CapacitanceModelSpec,
    pub kind: AbscissaKind,
    /// SI abscissae: m for separations, V for piezo voltages.
    pub abscissae: Vec<f64>,
    /// Required when `kind` is piezo voltage.
    pub calib: Option<PiezoCalibration>,
    /// Recorded uncertainty of every point, and the noise scale.
    pub sigma: SigmaSpec,
    pub seed: u64,
    /// When false the capacitances are the model curve itself.
    pub add_noise: bool,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_design(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// 351 separations from 500.5 nm to 4000.2 nm.
pub fn mto_design() -> Vec<f64> {
    linear_design(500.5e-9, 4000.2e-9, 351)
}

pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    if spec.abscissae.is_empty() {
        return Err(Error::Invalid("synthetic design has no points".into()));
    }
    if let SigmaSpec::PerPoint(v) = &spec.sigma {
        if v.len() != spec.abscissae.len() {
            return Err(Error::Invalid(format!(
                "{} per-point sigmas for {} design points",
                v.len(),
                spec.abscissae.len()
            )));
        }
    }
    let calib = match spec.kind {
        AbscissaKind::PiezoVoltage => Some(spec.calib.ok_or_else(|| {
            Error::Invalid("piezo-voltage synthesis needs a piezo calibration".into())
        })?),
        AbscissaKind::Separation => None,
    };

    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut points = Vec::with_capacity(spec.abscissae.len());
    for (i, &x) in spec.abscissae.iter().enumerate() {
        let d = calib.map_or(x, |c| c.separation(x));
        let truth = spec.truth.capacitance(d).map_err(|e| {
            Error::Invalid(format!("design point {i} (x = {x:e}, d = {d:e} m): {e}"))
        })?;
        let sigma = spec.sigma.at(i);
        // the stream advances once per point whether or not noise is added
        let z: f64 = StandardNormal.sample(&mut rng);
        let c = if spec.add_noise {
            truth + sigma * z
        } else {
            truth
        };
        points.push(
            Measurement::new(x, c, sigma)
                .map_err(|e| Error::Invalid(format!("design point {i} (x = {x:e}): {e}")))?,
        );
    }
    Dataset::new(spec.kind, points, format!("synthetic seed={}", spec.seed))
}
