/// Vacuum permittivity in F/m (CODATA 2018).
pub const EPSILON0: f64 = 8.854_187_812_8e-12;

/// Conversion factors between SI and the presentation units used in tables,
/// CSV files and on the command line.
pub mod units {
    pub const PF: f64 = 1e-12;
    pub const UM: f64 = 1e-6;
    pub const NM: f64 = 1e-9;
    /// pF/m, the unit of the normalized force -F/(V-V0)^2.
    pub const PF_PER_M: f64 = 1e-12;
    /// pF/µm, the unit of the parasitic gradient.
    pub const PF_PER_UM: f64 = 1e-6;

    pub fn to_pf(farad: f64) -> f64 {
        farad / PF
    }

    pub fn from_pf(pf: f64) -> f64 {
        pf * PF
    }
}
