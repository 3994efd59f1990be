//! Exact bispherical-coordinate series for a sphere above a plane.

use std::f64::consts::PI;

use super::geometry::{SphereGeometry, VoltageConfig};
use crate::constants::EPSILON0;
use crate::error::{Error, Result};
use crate::numerics::{NeumaierSum, SeriesResult};

/// Summation stops once the bound on the remaining tail is below this
/// fraction of the partial sum.
pub const SERIES_REL_TOL: f64 = 1e-13;
pub const MAX_SERIES_TERMS: usize = 5_000_000;

/// α with cosh α = 1 + d/R, written as log1p(x + sqrt(x(x+2))) so that it
/// stays accurate for d ≪ R.
pub fn alpha_parameter(d: f64, geom: &SphereGeometry) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain(
            "alpha_parameter",
            "d",
            d,
            "separation must be >= 0",
        ));
    }
    let x = d / geom.radius();
    Ok((x + (x * (x + 2.0)).sqrt()).ln_1p())
}

fn positive_alpha(context: &'static str, d: f64, geom: &SphereGeometry) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(context, "d", d, "separation must be > 0"));
    }
    let alpha = alpha_parameter(d, geom)?;
    if alpha == 0.0 {
        return Err(Error::domain(context, "d", d, "d/R underflows"));
    }
    Ok(alpha)
}

/// Σ_{n≥1} 1/sinh(nα) scaled by 4πε0 R sinh α.
pub fn exact_capacitance_series(d: f64, geom: &SphereGeometry) -> Result<SeriesResult> {
    const CTX: &str = "exact_capacitance";
    let alpha = positive_alpha(CTX, d, geom)?;
    let q = (-alpha).exp();
    let one_minus_q = -(-alpha).exp_m1();

    let mut acc = NeumaierSum::new();
    let mut n = 1usize;
    loop {
        // successive terms shrink at least by a factor q
        let t = 1.0 / (n as f64 * alpha).sinh();
        acc.add(t);
        let sum = acc.value();
        if t / one_minus_q < SERIES_REL_TOL * sum.abs() || t == 0.0 {
            let prefactor = 4.0 * PI * EPSILON0 * geom.radius() * alpha.sinh();
            return Ok(SeriesResult {
                value: prefactor * sum,
                terms_used: n,
                tail_bound: prefactor * t * q / one_minus_q,
            });
        }
        if n >= MAX_SERIES_TERMS {
            let prefactor = 4.0 * PI * EPSILON0 * geom.radius() * alpha.sinh();
            return Err(Error::Convergence {
                context: CTX,
                partial: prefactor * sum,
                terms: n,
                tail_bound: prefactor * t * q / one_minus_q,
            });
        }
        n += 1;
    }
}

/// Exact sphere-plane capacitance in F.
pub fn exact_capacitance(d: f64, geom: &SphereGeometry) -> Result<f64> {
    exact_capacitance_series(d, geom).map(|s| s.value)
}

/// -2πε0 Σ_{n≥1} (coth α - n coth nα)/sinh nα, i.e. -F/(V-V0)^2 in F/m.
pub fn exact_force_norm_series(d: f64, geom: &SphereGeometry) -> Result<SeriesResult> {
    const CTX: &str = "exact_force_norm";
    let alpha = positive_alpha(CTX, d, geom)?;
    let q = (-alpha).exp();
    let one_minus_q = -(-alpha).exp_m1();
    let coth_alpha = 1.0 / alpha.tanh();
    let prefactor = -2.0 * PI * EPSILON0;

    let mut acc = NeumaierSum::new();
    let mut n = 2usize; // n = 1 term vanishes identically
    loop {
        let na = n as f64 * alpha;
        let sinh_na = na.sinh();
        let coth_na = 1.0 / na.tanh();
        acc.add((coth_alpha - n as f64 * coth_na) / sinh_na);
        let sum = acc.value();

        // |t_k| <= k coth(nα) e^{-(k-n)α} / sinh(nα) for k > n
        let nf = n as f64;
        let tail = if sinh_na.is_infinite() {
            0.0
        } else {
            coth_na / sinh_na * (nf * q / one_minus_q + q / (one_minus_q * one_minus_q))
        };
        if tail < SERIES_REL_TOL * sum.abs() {
            return Ok(SeriesResult {
                value: prefactor * sum,
                terms_used: n,
                tail_bound: prefactor.abs() * tail,
            });
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::Convergence {
                context: CTX,
                partial: prefactor * sum,
                terms: n,
                tail_bound: prefactor.abs() * tail,
            });
        }
        n += 1;
    }
}

pub fn exact_force_norm(d: f64, geom: &SphereGeometry) -> Result<f64> {
    exact_force_norm_series(d, geom).map(|s| s.value)
}

/// Force in N; negative values are attractive.
pub fn exact_force(d: f64, geom: &SphereGeometry, volts: &VoltageConfig) -> Result<f64> {
    let u2 = volts.squared_difference();
    let norm = exact_force_norm(d, geom)?;
    Ok(-u2 * norm)
}

/// E = -C (V - V0)^2 / 2, in J.
pub fn electrostatic_energy(d: f64, geom: &SphereGeometry, volts: &VoltageConfig) -> Result<f64> {
    let c = exact_capacitance(d, geom)?;
    Ok(-0.5 * c * volts.squared_difference())
}
