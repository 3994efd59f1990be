//! Proximity-force, small-separation and power-expansion approximations of
//! the sphere-plane problem.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::geometry::{ExpansionCoefficients, SphereGeometry, ThetaParameter};
use crate::constants::EPSILON0;
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

/// Above this d/R the small-separation formula is flagged as out of range.
pub const SMALLSEP_VALIDITY_RATIO: f64 = 0.1;
/// Above this d/R the power expansion is flagged as out of range.
pub const EXPANSION_VALIDITY_RATIO: f64 = 0.05;

/// How the power sum enters the integrated expansion capacitance.
///
/// `AsPrinted` integrates the force expansion term by term, so its slope is
/// exactly -4πε0 Σ c_k (d/R)^k. `TableCompat` adds the power sum instead of
/// subtracting it, which is what the published comparison table shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMode {
    #[default]
    AsPrinted,
    TableCompat,
}

fn check_positive(context: &'static str, d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(context, "d", d, "separation must be > 0"));
    }
    Ok(())
}

/// 2πε0 R (ln(R/d) + ln 2 + 23/20 + θ/63), valid for d ≪ R.
pub fn smallsep_capacitance(d: f64, geom: &SphereGeometry, theta: ThetaParameter) -> Result<f64> {
    const CTX: &str = "smallsep_capacitance";
    check_positive(CTX, d)?;
    let r = geom.radius();
    if d >= r {
        return Err(Error::domain(
            CTX,
            "d",
            d,
            "small-separation form needs d < R",
        ));
    }
    if d > SMALLSEP_VALIDITY_RATIO * r {
        log::warn!(
            "{CTX}: d/R = {:.3} is outside the small-separation regime",
            d / r
        );
    }
    Ok(2.0 * PI * EPSILON0 * r * ((r / d).ln() + LN_2 + 23.0 / 20.0 + theta.value() / 63.0))
}

/// 2πε0 R ln(R/d), the leading term of the small-separation form.
///
/// Defined on 0 < d <= R; it vanishes at d = R.
pub fn pfa_capacitance(d: f64, geom: &SphereGeometry) -> Result<f64> {
    const CTX: &str = "pfa_capacitance";
    check_positive(CTX, d)?;
    let r = geom.radius();
    if d > r {
        return Err(Error::domain(
            CTX,
            "d",
            d,
            "proximity-force capacitance needs d <= R",
        ));
    }
    Ok(2.0 * PI * EPSILON0 * r * (r / d).ln())
}

/// πε0 R/d.
pub fn pfa_force_norm(d: f64, geom: &SphereGeometry) -> Result<f64> {
    check_positive("pfa_force_norm", d)?;
    Ok(PI * EPSILON0 * (geom.radius() / d))
}

fn warn_expansion_range(context: &str, ratio: f64) {
    if ratio > EXPANSION_VALIDITY_RATIO {
        log::warn!("{context}: d/R = {ratio:.3} exceeds the certified expansion range");
    }
}

/// 2πε0 Σ_{k=-1}^{6} c_k (d/R)^k, accumulated in ascending k.
pub fn expansion_force_norm(
    d: f64,
    geom: &SphereGeometry,
    coeffs: &ExpansionCoefficients,
) -> Result<f64> {
    const CTX: &str = "expansion_force_norm";
    check_positive(CTX, d)?;
    let x = d / geom.radius();
    warn_expansion_range(CTX, x);
    let mut acc = NeumaierSum::new();
    acc.add(coeffs.get(-1) / x);
    let mut power = 1.0;
    for k in 0..=6 {
        acc.add(coeffs.get(k) * power);
        power *= x;
    }
    Ok(2.0 * PI * EPSILON0 * acc.value())
}

/// Integrated expansion:
/// 4πε0 R [c_{-1} ln(R/d) + c̃ ∓ Σ_{k=0}^{6} c_k/(k+1) (d/R)^{k+1}]
/// with c̃ = ln2/2 + 23/40 + θ/126.
pub fn expansion_capacitance(
    d: f64,
    geom: &SphereGeometry,
    theta: ThetaParameter,
    coeffs: &ExpansionCoefficients,
    mode: ExpansionMode,
) -> Result<f64> {
    const CTX: &str = "expansion_capacitance";
    check_positive(CTX, d)?;
    let r = geom.radius();
    let x = d / r;
    warn_expansion_range(CTX, x);

    let mut power_sum = NeumaierSum::new();
    let mut power = x;
    for k in 0..=6 {
        power_sum.add(coeffs.get(k) / (k + 1) as f64 * power);
        power *= x;
    }
    let sign = match mode {
        ExpansionMode::AsPrinted => -1.0,
        ExpansionMode::TableCompat => 1.0,
    };
    let c_tilde = 0.5 * LN_2 + 23.0 / 40.0 + theta.value() / 126.0;

    let mut acc = NeumaierSum::new();
    acc.add(coeffs.get(-1) * (r / d).ln());
    acc.add(c_tilde);
    acc.add(sign * power_sum.value());
    Ok(4.0 * PI * EPSILON0 * r * acc.value())
}
