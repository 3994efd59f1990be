use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear piezo map d = β (V⁰ - V).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiezoCalibration {
    /// m/V
    pub beta: f64,
    /// V
    pub v0_pzt: f64,
}

impl PiezoCalibration {
    pub fn new(beta: f64, v0_pzt: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(
                "PiezoCalibration",
                "beta",
                beta,
                "beta must be > 0",
            ));
        }
        if !v0_pzt.is_finite() {
            return Err(Error::domain(
                "PiezoCalibration",
                "V0_PZT",
                v0_pzt,
                "must be finite",
            ));
        }
        Ok(Self { beta, v0_pzt })
    }

    pub fn separation(&self, v_pzt: f64) -> f64 {
        piezo_to_separation(v_pzt, self)
    }
}

/// Separation for a piezo voltage. Negative results are returned as is.
pub fn piezo_to_separation(v_pzt: f64, calib: &PiezoCalibration) -> f64 {
    calib.beta * (calib.v0_pzt - v_pzt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform() {
        let c = PiezoCalibration::new(87e-9, 68.43).unwrap();
        assert_eq!(piezo_to_separation(68.43, &c), 0.0);
        assert!((piezo_to_separation(68.76, &c) + 28.71e-9).abs() < 1e-12);
        let c = PiezoCalibration::new(87e-9, 69.93).unwrap();
        assert!((c.separation(0.0) - 6083.91e-9).abs() < 1e-12);
    }

    #[test]
    fn beta_must_be_positive() {
        assert!(PiezoCalibration::new(0.0, 1.0).is_err());
        assert!(PiezoCalibration::new(-87e-9, 1.0).is_err());
    }
}
