//! Calibration points and their CSV representation.
//!
//! ```text
//! # kind=separation_nm
//! # label=mto synthetic
//! x,cap_pF,sigma_pF
//! 500.5,72.39372,0.0002
//! ```
//!
//! The `# kind=` line is mandatory and fixes the unit of `x` (volts for
//! `piezo_volts`, nanometres for `separation_nm`). Other `#` lines are
//! ignored except `# label=`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::units;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,cap_pF,sigma_pF";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbscissaKind {
    /// x is the piezo voltage in V.
    PiezoVoltage,
    /// x is the absolute separation in m.
    Separation,
}

impl AbscissaKind {
    pub fn csv_tag(self) -> &'static str {
        match self {
            AbscissaKind::PiezoVoltage => "piezo_volts",
            AbscissaKind::Separation => "separation_nm",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "piezo_volts" => Some(AbscissaKind::PiezoVoltage),
            "separation_nm" => Some(AbscissaKind::Separation),
            _ => None,
        }
    }

    /// Factor from the CSV unit of x to SI.
    fn csv_scale(self) -> f64 {
        match self {
            AbscissaKind::PiezoVoltage => 1.0,
            AbscissaKind::Separation => units::NM,
        }
    }
}

/// One calibration point. `x` is SI (V or m), capacitances in F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub x: f64,
    pub capacitance: f64,
    pub sigma: f64,
}

impl Measurement {
    pub fn new(x: f64, capacitance: f64, sigma: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain("Measurement", "x", x, "must be finite"));
        }
        if !capacitance.is_finite() {
            return Err(Error::domain(
                "Measurement",
                "C",
                capacitance,
                "must be finite",
            ));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(
                "Measurement",
                "sigma",
                sigma,
                "must be finite and > 0",
            ));
        }
        Ok(Self {
            x,
            capacitance,
            sigma,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub kind: AbscissaKind,
    pub points: Vec<Measurement>,
    pub label: String,
}

impl Dataset {
    pub fn new(
        kind: AbscissaKind,
        points: Vec<Measurement>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("a dataset needs at least one point".into()));
        }
        Ok(Self {
            kind,
            points,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point indices in canonical order: by abscissa, then capacitance,
    /// then sigma. Sums taken in this order do not depend on how the file
    /// was arranged.
    pub(crate) fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| {
            let (p, q) = (&self.points[a], &self.points[b]);
            p.x.total_cmp(&q.x)
                .then(p.capacitance.total_cmp(&q.capacitance))
                .then(p.sigma.total_cmp(&q.sigma))
        });
        idx
    }

    pub fn to_csv(&self) -> String {
        let scale = self.kind.csv_scale();
        let mut out = String::new();
        let _ = writeln!(out, "# kind={}", self.kind.csv_tag());
        if !self.label.is_empty() {
            let _ = writeln!(out, "# label={}", self.label.replace(['\n', '\r'], " "));
        }
        let _ = writeln!(out, "{CSV_HEADER}");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.x / scale,
                units::to_pf(p.capacitance),
                units::to_pf(p.sigma)
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut label = String::new();
        let mut header_seen = false;
        let mut points = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            let line = line.strip_prefix('\u{feff}').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(tag) = comment.strip_prefix("kind=") {
                    let k = AbscissaKind::from_tag(tag.trim()).ok_or_else(|| Error::Format {
                        line: line_no,
                        message: format!(
                            "unknown kind '{}', expected piezo_volts or separation_nm",
                            tag.trim()
                        ),
                    })?;
                    if header_seen {
                        return Err(Error::Format {
                            line: line_no,
                            message: "kind comment must precede the header".into(),
                        });
                    }
                    kind = Some(k);
                } else if let Some(l) = comment.strip_prefix("label=") {
                    label = l.trim().to_string();
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["x", "cap_pF", "sigma_pF"] {
                    return Err(Error::Format {
                        line: line_no,
                        message: format!("expected header '{CSV_HEADER}', found '{line}'"),
                    });
                }
                if kind.is_none() {
                    return Err(Error::Format {
                        line: line_no,
                        message:
                            "missing '# kind=piezo_volts' or '# kind=separation_nm' before header"
                                .into(),
                    });
                }
                header_seen = true;
                continue;
            }
            let k = kind.expect("kind checked at header");
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let mut vals = [0.0f64; 3];
            for (slot, (field, name)) in vals
                .iter_mut()
                .zip(fields.iter().zip(["x", "cap_pF", "sigma_pF"]))
            {
                *slot = field.parse::<f64>().map_err(|_| Error::Format {
                    line: line_no,
                    message: format!("{name}: cannot parse '{field}' as a number"),
                })?;
            }
            let m = Measurement::new(
                vals[0] * k.csv_scale(),
                units::from_pf(vals[1]),
                units::from_pf(vals[2]),
            )
            .map_err(|e| Error::Format {
                line: line_no,
                message: e.to_string(),
            })?;
            points.push(m);
        }

        let kind = kind.ok_or_else(|| Error::Format {
            line: 1,
            message: "missing '# kind=' comment line".into(),
        })?;
        if !header_seen {
            return Err(Error::Format {
                line: text.lines().count().max(1),
                message: format!("missing header '{CSV_HEADER}'"),
            });
        }
        if points.is_empty() {
            return Err(Error::Format {
                line: text.lines().count().max(1),
                message: "dataset has no data rows".into(),
            });
        }
        Ok(Dataset {
            kind,
            points,
            label,
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_csv(&text)
    }
}
