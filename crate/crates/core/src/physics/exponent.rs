use super::model::{CapacitanceModelSpec, ModelKind};
use crate::error::{Error, Result};
use crate::numerics::{central_derivative, loglog_slope};

/// Anything that yields the normalized force -F/(V-V0)^2 at a separation.
pub trait ForceLaw {
    fn force_norm(&self, d: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> Result<f64>> ForceLaw for F {
    fn force_norm(&self, d: f64) -> Result<f64> {
        self(d)
    }
}

impl ForceLaw for ModelKind {
    fn force_norm(&self, d: f64) -> Result<f64> {
        ModelKind::force_norm(self, d)
    }
}

impl ForceLaw for CapacitanceModelSpec {
    fn force_norm(&self, d: f64) -> Result<f64> {
        CapacitanceModelSpec::force_norm(self, d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentResult {
    /// p such that |dF/dd| ~ d^-p.
    pub exponent: f64,
    pub separations: Vec<f64>,
    /// |d(force_norm)/dd| at each separation.
    pub gradients: Vec<f64>,
}

/// Effective power of the force gradient over `[d_lo, d_hi]`.
///
/// Gradients come from central differences at `n_points` log-spaced
/// separations; the exponent is minus the least-squares slope of
/// ln|gradient| against ln d, so a pure 1/d force gives exactly 2.
pub fn effective_exponent<M: ForceLaw + ?Sized>(
    model: &M,
    d_lo: f64,
    d_hi: f64,
    n_points: usize,
) -> Result<ExponentResult> {
    if !(d_lo > 0.0) {
        return Err(Error::domain(
            "effective_exponent",
            "d_lo",
            d_lo,
            "must be > 0",
        ));
    }
    if !(d_hi > d_lo) {
        return Err(Error::domain(
            "effective_exponent",
            "d_hi",
            d_hi,
            "must exceed d_lo",
        ));
    }
    if n_points < 3 {
        return Err(Error::Invalid(format!(
            "effective_exponent needs at least 3 points, got {n_points}"
        )));
    }
    let ratio = (d_hi / d_lo).ln();
    let separations: Vec<f64> = (0..n_points)
        .map(|i| d_lo * (ratio * i as f64 / (n_points - 1) as f64).exp())
        .collect();
    let gradients = separations
        .iter()
        .map(|&d| central_derivative(|t| model.force_norm(t), d, 1e-6).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&separations, &gradients)?;
    Ok(ExponentResult {
        exponent: -slope,
        separations,
        gradients,
    })
}
