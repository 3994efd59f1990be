//! Lens with a locally modified bottom: two sectors of radii R1 and R2 and
//! heights H and h, treated in the proximity-force approximation.

use std::f64::consts::PI;

use super::geometry::ModifiedLensGeometry;
use crate::constants::EPSILON0;
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

/// Constant term of the 30–100 nm power-law approximation, F.
pub const POWER_LAW_A1: f64 = 32.804e-12;
/// Coefficient of (d/R)^0.3 in the 30–100 nm power-law approximation, F.
pub const POWER_LAW_A3: f64 = -360.48e-12;

const SMALL_WINDOW: (f64, f64) = (30e-9, 100e-9);
const LARGE_THRESHOLD: f64 = 1e-6;

fn check_positive(context: &'static str, d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(context, "d", d, "separation must be > 0"));
    }
    Ok(())
}

/// `coef * ln(coef / x)`, taken as zero when the coefficient vanishes.
fn xlog_ratio(coef: f64, x: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * (coef / x).ln()
    }
}

/// πε0 [R2/d + (R1-R2)/(d+h) - (R1-R)/(d+h+H)].
pub fn modified_force_norm(d: f64, geom: &ModifiedLensGeometry) -> Result<f64> {
    check_positive("modified_force_norm", d)?;
    let (r, r1, r2) = (geom.r(), geom.r1(), geom.r2());
    let (h, big_h) = (geom.h_small(), geom.h_large());
    Ok(PI * EPSILON0 * (r2 / d + (r1 - r2) / (d + h) - (r1 - r) / (d + h + big_h)))
}

/// 2πε0 [R2 ln(R2/d) + (R1-R2) ln((R1-R2)/(d+h)) - (R1-R) ln((R1-R)/(d+h+H))] + C̃.
pub fn modified_capacitance(d: f64, geom: &ModifiedLensGeometry, c_tilde: f64) -> Result<f64> {
    check_positive("modified_capacitance", d)?;
    let (r, r1, r2) = (geom.r(), geom.r1(), geom.r2());
    let (h, big_h) = (geom.h_small(), geom.h_large());
    let mut acc = NeumaierSum::new();
    acc.add(xlog_ratio(r2, d));
    acc.add(xlog_ratio(r1 - r2, d + h));
    acc.add(-xlog_ratio(r1 - r, d + h + big_h));
    Ok(2.0 * PI * EPSILON0 * acc.value() + c_tilde)
}

/// A1 + A3 (d/R)^0.3 with the published 30–100 nm constants (C̃ excluded).
pub fn modified_capacitance_small(d: f64, geom: &ModifiedLensGeometry) -> Result<f64> {
    const CTX: &str = "modified_capacitance_small";
    check_positive(CTX, d)?;
    if d < SMALL_WINDOW.0 * (1.0 - 1e-12) || d > SMALL_WINDOW.1 * (1.0 + 1e-12) {
        log::warn!("{CTX}: d = {d:e} m is outside the 30-100 nm fit window");
    }
    Ok(POWER_LAW_A1 + POWER_LAW_A3 * (d / geom.r()).powf(0.3))
}

/// Large-separation asymptote
/// 2πε0 R ln(R/d) + 2πε0 R (H/d) ((R1-R)/R - (R-R2)/R · h/H) + C̃.
pub fn modified_capacitance_large(
    d: f64,
    geom: &ModifiedLensGeometry,
    c_tilde: f64,
) -> Result<f64> {
    const CTX: &str = "modified_capacitance_large";
    check_positive(CTX, d)?;
    if d < LARGE_THRESHOLD {
        log::warn!("{CTX}: d = {d:e} m is below the 1 µm asymptotic regime");
    }
    let (r, r1, r2) = (geom.r(), geom.r1(), geom.r2());
    let (h, big_h) = (geom.h_small(), geom.h_large());
    // R (H/d)((R1-R)/R - (R-R2)h/(R H)) rewritten without dividing by H
    let correction = (big_h * (r1 - r) - h * (r - r2)) / d;
    Ok(2.0 * PI * EPSILON0 * (r * (r / d).ln() + correction) + c_tilde)
}

/// Constant by which the full modified capacitance exceeds the two-term
/// asymptote as d → ∞ (both at equal C̃).
pub fn large_separation_offset(geom: &ModifiedLensGeometry) -> f64 {
    let (r, r1, r2) = (geom.r(), geom.r1(), geom.r2());
    let xlnx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    2.0 * PI * EPSILON0 * (xlnx(r2) + xlnx(r1 - r2) - xlnx(r1 - r) - xlnx(r))
}
