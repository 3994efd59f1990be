use nalgebra::{DMatrix, DVector};

use super::synth::linear_design;
use crate::error::{Error, Result};
use crate::numerics::weighted_linear_least_squares;
use crate::physics::{modified_capacitance, ModifiedLensGeometry};

pub const POWER_LAW_GRID_POINTS: usize = 200;

/// Unweighted least-squares constants (A1, A3), in F, of
/// `A1 + A3 (d/R)^0.3` against the modified-lens capacitance (C̃ = 0) on a
/// uniform grid over `[d_lo, d_hi]`.
pub fn refit_power_law_constants(
    geom: &ModifiedLensGeometry,
    d_lo: f64,
    d_hi: f64,
) -> Result<(f64, f64)> {
    refit_on_grid(geom, d_lo, d_hi, POWER_LAW_GRID_POINTS)
}

pub(crate) fn refit_on_grid(
    geom: &ModifiedLensGeometry,
    d_lo: f64,
    d_hi: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if !(d_lo > 0.0) {
        return Err(Error::domain(
            "refit_power_law_constants",
            "d_lo",
            d_lo,
            "must be > 0",
        ));
    }
    if !(d_hi > d_lo) {
        return Err(Error::domain(
            "refit_power_law_constants",
            "d_hi",
            d_hi,
            "must exceed d_lo",
        ));
    }
    fit_power_law_curve(
        |d| modified_capacitance(d, geom, 0.0),
        geom.r(),
        d_lo,
        d_hi,
        n,
    )
}

fn fit_power_law_curve<F>(f: F, r: f64, d_lo: f64, d_hi: f64, n: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ds = linear_design(d_lo, d_hi, n);
    let design = DMatrix::from_fn(
        n,
        2,
        |i, j| if j == 0 { 1.0 } else { (ds[i] / r).powf(0.3) },
    );
    let y = ds.iter().map(|&d| f(d)).collect::<Result<Vec<_>>>()?;
    let sol = weighted_linear_least_squares(
        &design,
        &DVector::from_vec(y),
        &DVector::from_element(n, 1.0),
    )?;
    Ok((sol.params[0], sol.params[1]))
}
