//! Run configuration: a TOML file with `[potential]`, `[units]`, `[run]` and
//! `[tolerances]` sections, and the compact `kind:key=value,...` potential
//! syntax used on the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{MonotoneCubic, Potential, PotentialKind};
use crate::units::Units;

/// A dimensionless potential as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: String,
    #[serde(default)]
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub mesh_file: Option<PathBuf>,
}

impl PotentialSpec {
    /// Parses `quadratic:b=0.5`, `linear:a=1`, `square:half_width=2,height=6`,
    /// `polynomial:c=1;0;-2;0;1` or `tabulated:mesh=well.csv`.
    pub fn parse_shorthand(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let kind = kind.trim().to_ascii_lowercase();
        let mut fields = Vec::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "expected key=value in potential spec, got `{part}`"
                ))
            })?;
            fields.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
        let take = |names: &[&str]| -> Result<f64> {
            let (_, v) = fields
                .iter()
                .find(|(k, _)| names.contains(&k.as_str()))
                .ok_or_else(|| Error::Config(format!("potential `{kind}` needs `{}`", names[0])))?;
            parse_number(v)
        };
        let known: &[&str] = match kind.as_str() {
            "linear" => &["a", "slope"],
            "quadratic" => &["b", "curvature"],
            "square" | "square_well" => &["half_width", "height"],
            "polynomial" => &["c", "coefficients"],
            "tabulated" => &["mesh", "mesh_file"],
            other => return Err(Error::Config(format!("unknown potential kind `{other}`"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "unknown key `{k}` for potential `{kind}`"
            )));
        }
        let spec = match kind.as_str() {
            "linear" => Self::simple("linear", vec![take(&["a", "slope"])?]),
            "quadratic" => Self::simple("quadratic", vec![take(&["b", "curvature"])?]),
            "square" | "square_well" => {
                Self::simple("square", vec![take(&["half_width"])?, take(&["height"])?])
            }
            "polynomial" => {
                let (_, v) = fields
                    .iter()
                    .find(|(k, _)| k == "c" || k == "coefficients")
                    .ok_or_else(|| Error::Config("potential `polynomial` needs `c`".into()))?;
                let coefficients = v
                    .split(';')
                    .map(|s| parse_number(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Self::simple("polynomial", coefficients)
            }
            _ => {
                let (_, v) = fields
                    .iter()
                    .find(|(k, _)| k == "mesh" || k == "mesh_file")
                    .ok_or_else(|| Error::Config("potential `tabulated` needs `mesh`".into()))?;
                Self {
                    kind: "tabulated".into(),
                    coefficients: Vec::new(),
                    mesh_file: Some(PathBuf::from(v)),
                }
            }
        };
        Ok(spec)
    }

    fn simple(kind: &str, coefficients: Vec<f64>) -> Self {
        Self {
            kind: kind.into(),
            coefficients,
            mesh_file: None,
        }
    }

    /// Builds the potential; relative mesh paths resolve against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<Potential> {
        let coeffs = |n: usize| -> Result<()> {
            if self.coefficients.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "potential `{}` takes {n} coefficient(s), got {}",
                    self.kind,
                    self.coefficients.len()
                )))
            }
        };
        let kind = match self.kind.to_ascii_lowercase().as_str() {
            "linear" => {
                coeffs(1)?;
                PotentialKind::Linear {
                    slope: self.coefficients[0],
                }
            }
            "quadratic" => {
                coeffs(1)?;
                PotentialKind::Quadratic {
                    curvature: self.coefficients[0],
                }
            }
            "square" | "square_well" => {
                coeffs(2)?;
                PotentialKind::SquareWell {
                    half_width: self.coefficients[0],
                    height: self.coefficients[1],
                }
            }
            "polynomial" => {
                if self.coefficients.is_empty() {
                    return Err(Error::Config(
                        "polynomial needs at least one coefficient".into(),
                    ));
                }
                PotentialKind::Polynomial {
                    coefficients: self.coefficients.clone(),
                }
            }
            "tabulated" => {
                let file = self
                    .mesh_file
                    .as_ref()
                    .ok_or_else(|| Error::Config("tabulated potential needs mesh_file".into()))?;
                let path = match base {
                    Some(dir) if file.is_relative() => dir.join(file),
                    _ => file.clone(),
                };
                PotentialKind::Tabulated {
                    table: MonotoneCubic::from_csv(path)?,
                }
            }
            other => return Err(Error::Config(format!("unknown potential kind `{other}`"))),
        };
        Potential::new(kind)
    }
}

fn parse_number(text: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("`{text}` is not a finite number")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Requested quantum numbers.
    pub levels: Vec<usize>,
    /// Energy window `(lo, hi)` in units of `m c^2`; derived from the levels when absent.
    pub window: Option<[f64; 2]>,
    pub output_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            levels: vec![0],
            window: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed `|total/pi - (n+1)|`.
    pub residual: f64,
    /// Allowed disagreement between independent eigenvalue routes.
    pub cross_check: f64,
    /// Allowed difference from the reference tables.
    pub reference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-6,
            cross_check: 1e-8,
            reference: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Option<PotentialSpec>,
    pub units: Units,
    pub run: RunSection,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.units
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let t = self.tolerances;
        for (name, v) in [
            ("residual", t.residual),
            ("cross_check", t.cross_check),
            ("reference", t.reference),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerance `{name}` must be positive, got {v}"
                )));
            }
        }
        if let Some([lo, hi]) = self.run.window {
            if !(lo < hi) {
                return Err(Error::Config(format!("window [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }

    pub fn build_potential(&self) -> Result<Potential> {
        self.potential
            .as_ref()
            .ok_or_else(|| Error::Config("no potential given".into()))?
            .build(self.base_dir.as_deref())
    }

    /// Canonical serialization, used for hashing.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}
