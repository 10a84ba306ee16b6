//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entire::{EntireFunctionSpec, ExpPolyTerm};
use crate::growth::YoungSpec;
use crate::C64;

/// A complex number as `{"re": …, "im": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexValue> for C64 {
    fn from(c: ComplexValue) -> Self {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for ComplexValue {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyExpTermConfig {
    pub poly: Vec<ComplexValue>,
    pub lambda: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    /// `[[w, λ], …]`.
    Expsum {
        terms: Vec<(ComplexValue, ComplexValue)>,
    },
    Polyexpsum {
        terms: Vec<PolyExpTermConfig>,
    },
    Polynomial {
        coeffs: Vec<ComplexValue>,
    },
    SegmentAverage {
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThetaConfig {
    Linear,
    Power { p: f64 },
    Table { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    /// Centre plus `rings` circles of `per_ring` points up to `radius`.
    Disk {
        radius: f64,
        #[serde(default = "default_rings")]
        rings: usize,
        #[serde(default = "default_per_ring")]
        per_ring: usize,
    },
    /// `nx × ny` lattice on `[re_min, re_max] × [im_min, im_max]`.
    Rect {
        re: (f64, f64),
        im: (f64, f64),
        nx: usize,
        ny: usize,
    },
    Points {
        points: Vec<ComplexValue>,
    },
}

fn default_rings() -> usize {
    4
}

fn default_per_ring() -> usize {
    16
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::Disk {
            radius: 1.0,
            rings: default_rings(),
            per_ring: default_per_ring(),
        }
    }
}

impl GridConfig {
    pub fn points(&self) -> Vec<C64> {
        match self {
            Self::Disk {
                radius,
                rings,
                per_ring,
            } => {
                let mut out = vec![C64::new(0.0, 0.0)];
                for i in 1..=*rings {
                    let r = radius * i as f64 / *rings as f64;
                    for j in 0..*per_ring {
                        let t = std::f64::consts::TAU * j as f64 / *per_ring as f64;
                        out.push(C64::from_polar(r, t));
                    }
                }
                out
            }
            Self::Rect { re, im, nx, ny } => {
                let step = |lo: f64, hi: f64, n: usize, i: usize| {
                    if n <= 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                };
                let mut out = Vec::with_capacity(nx * ny);
                for j in 0..*ny {
                    for i in 0..*nx {
                        out.push(C64::new(step(re.0, re.1, *nx, i), step(im.0, im.1, *ny, j)));
                    }
                }
                out
            }
            Self::Points { points } => points.iter().map(|&p| p.into()).collect(),
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            Self::Disk {
                radius,
                rings,
                per_ring,
            } => {
                if !(*radius >= 0.0) || *rings == 0 || *per_ring == 0 {
                    return Err("grid: disk needs radius >= 0 and positive rings/per_ring".into());
                }
            }
            Self::Rect { nx, ny, .. } => {
                if *nx == 0 || *ny == 0 {
                    return Err("grid: rect needs positive nx and ny".into());
                }
            }
            Self::Points { points } => {
                if points.is_empty() {
                    return Err("grid: points list is empty".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Zero-finder tolerance.
    #[serde(default = "default_zero_tol")]
    pub zero: f64,
    /// Mean-periodicity and monomial-identity residuals.
    #[serde(default = "default_residual_tol")]
    pub residual: f64,
    /// Sup-error of reconstruction.
    #[serde(default = "default_residual_tol")]
    pub reconstruction: f64,
}

fn default_zero_tol() -> f64 {
    1e-12
}

fn default_residual_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: default_zero_tol(),
            residual: default_residual_tol(),
            reconstruction: default_residual_tol(),
        }
    }
}

fn default_m_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

fn default_norm_p() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub phi: FunctionConfig,
    #[serde(default = "default_theta")]
    pub theta: ThetaConfig,
    #[serde(default)]
    pub f: Option<FunctionConfig>,
    pub radius: f64,
    /// Largest packet index kept; all zeros in the radius when absent.
    #[serde(rename = "K", default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_m_grid")]
    pub m_grid: Vec<f64>,
    #[serde(default = "default_norm_p")]
    pub norm_p: Vec<f64>,
    /// Output file names keyed by artifact, overriding the defaults.
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
}

fn default_theta() -> ThetaConfig {
    ThetaConfig::Linear
}

/// Parse or validation failure, with a source position when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "config error at line {l}, column {c}: {}", self.message),
            _ => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn field(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: None,
            column: None,
        }
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(ConfigError::field(format!(
                "radius: must be positive, got {}",
                self.radius
            )));
        }
        self.phi_spec()?;
        self.theta_spec()?;
        self.f_spec()?;
        self.grid.validate().map_err(ConfigError::field)?;
        if self.m_grid.iter().any(|m| !(*m > 0.0)) || self.m_grid.is_empty() {
            return Err(ConfigError::field("m_grid: needs positive entries"));
        }
        if self.norm_p.iter().any(|p| !(*p > 0.0)) {
            return Err(ConfigError::field("norm_p: needs positive entries"));
        }
        Ok(())
    }

    pub fn phi_spec(&self) -> Result<EntireFunctionSpec, ConfigError> {
        self.phi.to_spec().map_err(|e| ConfigError::field(format!("phi: {e}")))
    }

    pub fn f_spec(&self) -> Result<Option<EntireFunctionSpec>, ConfigError> {
        self.f
            .as_ref()
            .map(|f| f.to_spec().map_err(|e| ConfigError::field(format!("f: {e}"))))
            .transpose()
    }

    pub fn theta_spec(&self) -> Result<YoungSpec, ConfigError> {
        self.theta
            .to_spec()
            .map_err(|e| ConfigError::field(format!("theta: {e}")))
    }

    /// File name for an artifact, honouring `outputs`.
    pub fn output_name<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.outputs.get(key).map(String::as_str).unwrap_or(default)
    }
}

impl FunctionConfig {
    pub fn to_spec(&self) -> crate::error::Result<EntireFunctionSpec> {
        match self {
            Self::Expsum { terms } => {
                EntireFunctionSpec::exp_sum(terms.iter().map(|&(w, l)| (w.into(), l.into())).collect())
            }
            Self::Polyexpsum { terms } => EntireFunctionSpec::poly_exp_sum(
                terms
                    .iter()
                    .map(|t| ExpPolyTerm {
                        poly: t.poly.iter().map(|&c| c.into()).collect(),
                        lambda: t.lambda.into(),
                    })
                    .collect(),
            ),
            Self::Polynomial { coeffs } => EntireFunctionSpec::polynomial(coeffs.iter().map(|&c| c.into()).collect()),
            Self::SegmentAverage { t } => EntireFunctionSpec::segment_average(*t),
        }
    }
}

impl ThetaConfig {
    pub fn to_spec(&self) -> crate::error::Result<YoungSpec> {
        match self {
            Self::Linear => Ok(YoungSpec::Linear),
            Self::Power { p } => YoungSpec::power(*p),
            Self::Table { points } => YoungSpec::table(points.clone()),
        }
    }
}
