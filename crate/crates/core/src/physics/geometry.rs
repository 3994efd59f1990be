use serde::{Deserialize, Serialize};

use crate::constants::units;
use crate::error::{Error, Result};

/// A perfect sphere of radius `R` above a plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphereRepr", into = "SphereRepr")]
pub struct SphereGeometry {
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct SphereRepr {
    radius: f64,
}

impl TryFrom<SphereRepr> for SphereGeometry {
    type Error = Error;
    fn try_from(r: SphereRepr) -> Result<Self> {
        SphereGeometry::new(r.radius)
    }
}

impl From<SphereGeometry> for SphereRepr {
    fn from(g: SphereGeometry) -> Self {
        SphereRepr { radius: g.radius }
    }
}

impl SphereGeometry {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(
                "SphereGeometry",
                "R",
                radius,
                "radius must be finite and > 0",
            ));
        }
        Ok(Self { radius })
    }

    pub fn from_um(radius_um: f64) -> Result<Self> {
        Self::new(radius_um * units::UM)
    }

    /// The gold-coated sapphire sphere of the torsional-oscillator setup,
    /// R = 151.3 µm.
    pub fn mto_sphere() -> Self {
        Self { radius: 151.3e-6 }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Spherical lens whose bottom carries two sectors of different curvature.
///
/// The outer sector has radius `r1` and height `h_large`, the inner one has
/// radius `r2` and height `h_small`; `r` is the nominal lens radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LensRepr", into = "LensRepr")]
pub struct ModifiedLensGeometry {
    r: f64,
    r1: f64,
    r2: f64,
    h_small: f64,
    h_large: f64,
}

#[derive(Serialize, Deserialize)]
struct LensRepr {
    r: f64,
    r1: f64,
    r2: f64,
    h_small: f64,
    h_large: f64,
}

impl TryFrom<LensRepr> for ModifiedLensGeometry {
    type Error = Error;
    fn try_from(l: LensRepr) -> Result<Self> {
        ModifiedLensGeometry::new_relaxed(l.r, l.r1, l.r2, l.h_small, l.h_large)
    }
}

impl From<ModifiedLensGeometry> for LensRepr {
    fn from(g: ModifiedLensGeometry) -> Self {
        LensRepr {
            r: g.r,
            r1: g.r1,
            r2: g.r2,
            h_small: g.h_small,
            h_large: g.h_large,
        }
    }
}

impl ModifiedLensGeometry {
    /// Strict constructor: all lengths > 0, `r2 < r < r1`, `h_small < h_large`.
    pub fn new(r: f64, r1: f64, r2: f64, h_small: f64, h_large: f64) -> Result<Self> {
        const CTX: &str = "ModifiedLensGeometry";
        for (name, v) in [
            ("R", r),
            ("R1", r1),
            ("R2", r2),
            ("h", h_small),
            ("H", h_large),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(CTX, name, v, "must be finite and > 0"));
            }
        }
        if !(r1 > r) {
            return Err(Error::domain(CTX, "R1", r1, "R1 must exceed R"));
        }
        if !(r2 < r) {
            return Err(Error::domain(CTX, "R2", r2, "R2 must be below R"));
        }
        if !(h_small < h_large) {
            return Err(Error::domain(CTX, "h", h_small, "h must be below H"));
        }
        Ok(Self {
            r,
            r1,
            r2,
            h_small,
            h_large,
        })
    }

    /// Admits the degenerate limits `r1 = r = r2` and `h = H = 0`, where the
    /// lens reduces to a plain sphere.
    pub fn new_relaxed(r: f64, r1: f64, r2: f64, h_small: f64, h_large: f64) -> Result<Self> {
        const CTX: &str = "ModifiedLensGeometry";
        for (name, v) in [("R", r), ("R1", r1), ("R2", r2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(CTX, name, v, "must be finite and > 0"));
            }
        }
        for (name, v) in [("h", h_small), ("H", h_large)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(CTX, name, v, "must be finite and >= 0"));
            }
        }
        if !(r1 >= r) {
            return Err(Error::domain(CTX, "R1", r1, "R1 must be >= R"));
        }
        if !(r2 <= r) {
            return Err(Error::domain(CTX, "R2", r2, "R2 must be <= R"));
        }
        if !(h_small <= h_large) {
            return Err(Error::domain(CTX, "h", h_small, "h must be <= H"));
        }
        Ok(Self {
            r,
            r1,
            r2,
            h_small,
            h_large,
        })
    }

    /// The 30.9 mm lens with R1 = 49.4 mm, R2 = 30 µm, h = 8 nm, H = 250 nm.
    pub fn reference_lens() -> Self {
        Self {
            r: 30.9e-3,
            r1: 49.4e-3,
            r2: 30e-6,
            h_small: 8e-9,
            h_large: 250e-9,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn r1(&self) -> f64 {
        self.r1
    }
    pub fn r2(&self) -> f64 {
        self.r2
    }
    pub fn h_small(&self) -> f64 {
        self.h_small
    }
    pub fn h_large(&self) -> f64 {
        self.h_large
    }
}

/// Coefficients c_{-1} .. c_6 of the power expansion of the sphere-plane
/// force in `d/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    c: [f64; 8],
}

impl ExpansionCoefficients {
    pub const STANDARD: [f64; 8] = [
        0.5, -1.182_60, 22.237_5, -571.366, 9_592.45, -90_200.5, 383_084.0, -300_357.0,
    ];

    pub fn standard() -> Self {
        Self { c: Self::STANDARD }
    }

    /// Coefficient of `(d/R)^k` for k in -1..=6.
    pub fn get(&self, k: i32) -> f64 {
        assert!(
            (-1..=6).contains(&k),
            "expansion index {k} out of range -1..=6"
        );
        self.c[(k + 1) as usize]
    }

    pub fn as_array(&self) -> &[f64; 8] {
        &self.c
    }
}

impl Default for ExpansionCoefficients {
    fn default() -> Self {
        Self::standard()
    }
}

/// Constant of the small-separation expansion, restricted to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ThetaParameter(f64);

impl ThetaParameter {
    pub const DEFAULT: ThetaParameter = ThetaParameter(0.5);

    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::domain(
                "ThetaParameter",
                "theta",
                theta,
                "theta must lie in [0, 1]",
            ));
        }
        Ok(Self(theta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for ThetaParameter {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<f64> for ThetaParameter {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ThetaParameter> for f64 {
    fn from(t: ThetaParameter) -> f64 {
        t.0
    }
}

/// Applied voltage and residual potential difference, in volts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageConfig {
    pub v: f64,
    pub v0: f64,
}

impl VoltageConfig {
    pub fn new(v: f64, v0: f64) -> Self {
        Self { v, v0 }
    }

    pub fn squared_difference(&self) -> f64 {
        let u = self.v - self.v0;
        u * u
    }
}

/// Linear parasitic background `C_p(d) = a1 - a2 d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParasiticParams {
    /// F
    pub a1: f64,
    /// F/m
    pub a2: f64,
}

impl ParasiticParams {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !a1.is_finite() {
            return Err(Error::domain("ParasiticParams", "A1", a1, "must be finite"));
        }
        if !a2.is_finite() {
            return Err(Error::domain("ParasiticParams", "A2", a2, "must be finite"));
        }
        Ok(Self { a1, a2 })
    }

    /// The torsional-oscillator background: 72.32971 pF and 2.18e-4 pF/µm.
    pub fn mto_fit() -> Self {
        Self {
            a1: 72.329_71e-12,
            a2: 2.18e-4 * units::PF_PER_UM,
        }
    }
}
