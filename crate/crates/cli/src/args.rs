use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use capcal::calibration::FitFamily;
use capcal::physics::{
    CapacitanceModelSpec, ExpansionMode, ModelKind, ModifiedLensGeometry, ParasiticParams,
    SphereGeometry, ThetaParameter,
};
use capcal::units::{NM, PF, UM};

use crate::Failure;

/// Sphere-plane and lens-plane capacitance models and calibration fits.
#[derive(Debug, Parser)]
#[command(name = "capcal", version, about)]
pub struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Repeat to raise log verbosity on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacitance and normalized force at given separations.
    Eval(EvalArgs),
    /// Exact / PFA / expansion comparison table for a sphere.
    Table(TableArgs),
    /// Modified-lens capacitance with its small- and large-separation forms.
    Curves(CurvesArgs),
    /// Fit a model family to a dataset CSV.
    Fit(FitArgs),
    /// Generate a synthetic dataset CSV plus a JSON sidecar.
    Synth(SynthArgs),
    /// Effective power law of the force gradient.
    Exponent(ExponentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Exact,
    Pfa,
    Smallsep,
    Expansion,
    Modified,
    Powerlaw,
    Ideallog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    ExactParasitic,
    PfaParasitic,
    Modified,
    Ideallog,
    Powerlaw,
}

#[derive(Debug, Clone, Args)]
pub struct SphereArgs {
    /// Sphere (or lens) radius in µm. Lens default 30900.
    #[arg(long = "R-um")]
    pub r_um: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LensArgs {
    #[arg(long = "R1-um", default_value_t = 49_400.0)]
    pub r1_um: f64,
    #[arg(long = "R2-um", default_value_t = 30.0)]
    pub r2_um: f64,
    #[arg(long = "h-nm", default_value_t = 8.0)]
    pub h_nm: f64,
    #[arg(long = "H-nm", default_value_t = 250.0)]
    pub big_h_nm: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelChoice::Exact)]
    pub model: ModelChoice,
    #[command(flatten)]
    pub sphere: SphereArgs,
    #[command(flatten)]
    pub lens: LensArgs,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Expansion capacitance in table-compatible form.
    #[arg(long)]
    pub table_compat: bool,
    /// Additive constant of the modified-lens capacitance, pF.
    #[arg(long = "c-tilde-pF", default_value_t = 0.0)]
    pub c_tilde_pf: f64,
    /// Constant term for powerlaw / ideallog, pF.
    #[arg(long = "a1-pF")]
    pub a1_pf: Option<f64>,
    /// Slope for powerlaw (pF·m^-0.3) or ideallog (pF).
    #[arg(long = "a3-pF")]
    pub a3_pf: Option<f64>,
    /// Parasitic constant A1, pF.
    #[arg(long = "parasitic-a1-pF")]
    pub parasitic_a1_pf: Option<f64>,
    /// Parasitic slope A2, pF/µm.
    #[arg(long = "parasitic-a2-pF-per-um")]
    pub parasitic_a2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PiezoArgs {
    /// Piezo gain, nm/V.
    #[arg(long = "beta-nm-per-V")]
    pub beta_nm_v: Option<f64>,
    /// Piezo voltage at contact, V.
    #[arg(long = "v0-pzt")]
    pub v0_pzt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "d-um", value_delimiter = ',', allow_negative_numbers = true)]
    pub d_um: Vec<f64>,
    #[arg(long = "d-nm", value_delimiter = ',', allow_negative_numbers = true)]
    pub d_nm: Vec<f64>,
    /// Log-spaced range in nm: LO HI.
    #[arg(long = "range-nm", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub range_nm: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Piezo voltages, converted with --beta-nm-per-V and --v0-pzt.
    #[arg(long = "v-pzt", value_delimiter = ',', allow_negative_numbers = true)]
    pub v_pzt: Vec<f64>,
    #[command(flatten)]
    pub piezo: PiezoArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long = "R-um", default_value_t = 151.3)]
    pub r_um: f64,
    #[arg(
        long = "d-um",
        value_delimiter = ',',
        default_value = "0.5,1.0,1.5,2.0,2.5,3.0,3.5,4.0"
    )]
    pub d_um: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long)]
    pub table_compat: bool,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    #[command(flatten)]
    pub lens: LensArgs,
    #[arg(long = "c-tilde-pF", default_value_t = 0.0)]
    pub c_tilde_pf: f64,
    #[arg(
        long = "from-nm",
        default_value_t = 30.0,
        allow_negative_numbers = true
    )]
    pub from_nm: f64,
    #[arg(
        long = "to-nm",
        default_value_t = 10_000.0,
        allow_negative_numbers = true
    )]
    pub to_nm: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub dataset: PathBuf,
    #[arg(long, value_enum)]
    pub family: FamilyChoice,
    #[command(flatten)]
    pub sphere: SphereArgs,
    #[command(flatten)]
    pub lens: LensArgs,
    #[command(flatten)]
    pub piezo: PiezoArgs,
    /// Lower end of the V0 search, V.
    #[arg(long = "v0-min", requires = "v0_max")]
    pub v0_min: Option<f64>,
    #[arg(long = "v0-max", requires = "v0_min")]
    pub v0_max: Option<f64>,
    #[arg(long, default_value_t = capcal::numerics::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Truth without the default parasitic background.
    #[arg(long)]
    pub no_parasitic: bool,
    #[arg(
        long = "from-nm",
        default_value_t = 500.5,
        allow_negative_numbers = true
    )]
    pub from_nm: f64,
    #[arg(
        long = "to-nm",
        default_value_t = 4000.2,
        allow_negative_numbers = true
    )]
    pub to_nm: f64,
    /// Design in piezo voltage instead: FROM TO, V.
    #[arg(long = "v-pzt-range", num_args = 2, value_names = ["FROM", "TO"], allow_negative_numbers = true)]
    pub v_pzt_range: Option<Vec<f64>>,
    #[command(flatten)]
    pub piezo: PiezoArgs,
    #[arg(short = 'n', long, default_value_t = 351)]
    pub points: usize,
    /// Noise standard deviation, pF. 0 writes the model curve.
    #[arg(long = "sigma-pF", alias = "sigma", default_value_t = 2e-4)]
    pub sigma_pf: f64,
    /// Uncertainty recorded when --sigma-pF is 0, pF.
    #[arg(long = "weight-sigma-pF", default_value_t = 2e-4)]
    pub weight_sigma_pf: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(
        long = "from-nm",
        default_value_t = 30.0,
        allow_negative_numbers = true
    )]
    pub from_nm: f64,
    #[arg(long = "to-nm", default_value_t = 100.0, allow_negative_numbers = true)]
    pub to_nm: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

fn flag<T>(r: capcal::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::usage(e.to_string()))
}

impl SphereArgs {
    pub fn sphere(&self) -> Result<SphereGeometry, Failure> {
        flag(SphereGeometry::from_um(self.r_um.unwrap_or(151.3)))
    }

    fn lens_r(&self) -> f64 {
        self.r_um.unwrap_or(30_900.0) * UM
    }
}

impl LensArgs {
    pub fn geometry(&self, sphere: &SphereArgs) -> Result<ModifiedLensGeometry, Failure> {
        flag(ModifiedLensGeometry::new(
            sphere.lens_r(),
            self.r1_um * UM,
            self.r2_um * UM,
            self.h_nm * NM,
            self.big_h_nm * NM,
        ))
    }
}

impl ModelArgs {
    pub fn kind(&self) -> Result<ModelKind, Failure> {
        let theta = || flag(ThetaParameter::new(self.theta));
        Ok(match self.model {
            ModelChoice::Exact => ModelKind::ExactSphere {
                geometry: self.sphere.sphere()?,
            },
            ModelChoice::Pfa => ModelKind::PfaLeading {
                geometry: self.sphere.sphere()?,
            },
            ModelChoice::Smallsep => ModelKind::SmallSepLog {
                geometry: self.sphere.sphere()?,
                theta: theta()?,
            },
            ModelChoice::Expansion => ModelKind::Expansion {
                geometry: self.sphere.sphere()?,
                theta: theta()?,
                mode: if self.table_compat {
                    ExpansionMode::TableCompat
                } else {
                    ExpansionMode::AsPrinted
                },
            },
            ModelChoice::Modified => ModelKind::ModifiedLens {
                geometry: self.lens.geometry(&self.sphere)?,
                c_tilde: self.c_tilde_pf * PF,
            },
            ModelChoice::Powerlaw => ModelKind::PowerLaw {
                a1: self.a1_pf.unwrap_or(222.96) * PF,
                a3: self.a3_pf.unwrap_or(-346.2) * PF,
            },
            ModelChoice::Ideallog => {
                let geometry = self.sphere.sphere()?;
                let theoretical = ModelKind::ideal_log_theoretical(0.0, geometry);
                let ModelKind::IdealLog { a3, .. } = theoretical else {
                    unreachable!()
                };
                ModelKind::IdealLog {
                    a1: self.a1_pf.unwrap_or(0.0) * PF,
                    a3: self.a3_pf.map_or(a3, |v| v * PF),
                    geometry,
                }
            }
        })
    }

    /// Model plus the parasitic background, if any was requested.
    pub fn spec(
        &self,
        default_parasitic: Option<ParasiticParams>,
    ) -> Result<CapacitanceModelSpec, Failure> {
        let kind = self.kind()?;
        let parasitic = match (self.parasitic_a1_pf, self.parasitic_a2) {
            (None, None) => default_parasitic,
            (a1, a2) => Some(flag(ParasiticParams::new(
                a1.unwrap_or(0.0) * PF,
                a2.unwrap_or(0.0) * PF / UM,
            ))?),
        };
        Ok(match parasitic {
            Some(p) => CapacitanceModelSpec::with_parasitic(kind, p),
            None => CapacitanceModelSpec::new(kind),
        })
    }
}

impl PiezoArgs {
    pub fn calibration(&self) -> Result<Option<capcal::calibration::PiezoCalibration>, Failure> {
        match (self.beta_nm_v, self.v0_pzt) {
            (None, None) => Ok(None),
            (Some(b), Some(v0)) => Ok(Some(flag(capcal::calibration::PiezoCalibration::new(
                b * NM,
                v0,
            ))?)),
            (None, Some(_)) => Err(Failure::usage("--v0-pzt needs --beta-nm-per-V")),
            (Some(_), None) => Err(Failure::usage("--beta-nm-per-V needs --v0-pzt")),
        }
    }
}

impl FitArgs {
    pub fn family(&self) -> Result<FitFamily, Failure> {
        Ok(match self.family {
            FamilyChoice::ExactParasitic => FitFamily::ExactParasitic {
                geometry: self.sphere.sphere()?,
            },
            FamilyChoice::PfaParasitic => FitFamily::PfaParasitic {
                geometry: self.sphere.sphere()?,
            },
            FamilyChoice::Modified => FitFamily::ModifiedLens {
                geometry: self.lens.geometry(&self.sphere)?,
            },
            FamilyChoice::Ideallog => FitFamily::IdealLog {
                geometry: self.sphere.sphere()?,
            },
            FamilyChoice::Powerlaw => FitFamily::PowerLaw,
        })
    }
}
