use crate::error::CliError;
use cone_ends::family::Side;
use cone_ends::fixtures::{DEFAULT_RESOLUTION, MIN_RESOLUTION};
use cone_ends::grafting::{RotationSense, HOLONOMY_TOL};
use cone_ends::tol::Tolerances;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    BuildEnd,
    Foliate,
    Dualize,
    Graft,
    Schwarzian,
    Verify,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::BuildEnd => "build-end",
            CommandName::Foliate => "foliate",
            CommandName::Dualize => "dualize",
            CommandName::Graft => "graft",
            CommandName::Schwarzian => "schwarzian",
            CommandName::Verify => "verify",
        }
    }
}

/// Input files; `fixture` names a built-in input used when no file is given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub fixture: Option<String>,
    /// Field file with "I*" and either "q" or "II*"; optional "K_I*" and "w".
    pub datum: Option<PathBuf>,
    pub representation: Option<PathBuf>,
    pub multicurve: Option<PathBuf>,
    pub germ: Option<PathBuf>,
    /// Field file with "h", "h'" and "b".
    pub pair: Option<PathBuf>,
}

/// Overrides of the library tolerances plus the holonomy and Schwarzian ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    #[serde(flatten)]
    pub core: Tolerances,
    pub holonomy: f64,
    pub schwarzian: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { core: Tolerances::default(), holonomy: HOLONOMY_TOL, schwarzian: 1e-9 }
    }
}

/// Sampling of the built-in surfaces and of the parameter grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// Samples per axis; overrides `h_grid`.
    pub n: Option<usize>,
    /// Centre-chart spacing, converted to a sample count.
    pub h_grid: Option<f64>,
    pub n_r: Option<usize>,
    #[serde(rename = "n_α", alias = "n_alpha")]
    pub n_alpha: Option<usize>,
    /// Spacing of the default parameter grid of build-end.
    #[serde(rename = "Δr", alias = "delta_r")]
    pub delta_r: Option<f64>,
}

/// Width of the octagon centre chart, used to turn `h_grid` into a sample count.
const CENTER_WIDTH: f64 = 0.44;

impl Resolution {
    pub fn samples(&self) -> usize {
        match (self.n, self.h_grid) {
            (Some(n), _) => n,
            (None, Some(h)) => (CENTER_WIDTH / h).round() as usize + 1,
            (None, None) => DEFAULT_RESOLUTION,
        }
    }

    pub fn radial(&self) -> usize {
        self.n_r.unwrap_or_else(|| self.samples())
    }

    pub fn angular(&self) -> usize {
        self.n_alpha.unwrap_or(16)
    }
}

/// A schwarzian input germ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GermSpec {
    /// Entries a, b, c, d as [re, im].
    Moebius {
        entries: [[f64; 2]; 4],
    },
    /// Coefficients of 1, z, z², … as [re, im].
    Polynomial {
        coefficients: Vec<[f64; 2]>,
    },
    Power {
        exponent: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub inputs: Inputs,
    pub tolerances: ToleranceConfig,
    pub resolution: Resolution,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub side: Side,
    /// Lower end of the convexity threshold search.
    pub search_floor: f64,
    /// Leaf parameters for build-end; defaults to the threshold, 0 and a Δr grid.
    pub params: Option<Vec<f64>>,
    /// Curvature grid for foliate and dualize.
    pub curvatures: Option<Vec<f64>>,
    pub dualize: bool,
    /// Factor applied to every multicurve weight.
    pub weight_scale: f64,
    pub sense: RotationSense,
    /// Cone angles for the schwarzian ring regression.
    pub thetas: Option<Vec<f64>>,
    pub germ: Option<GermSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            inputs: Inputs::default(),
            tolerances: ToleranceConfig::default(),
            resolution: Resolution::default(),
            out: None,
            seed: 0,
            side: Side::Hyperbolic,
            search_floor: -2.0,
            params: None,
            curvatures: None,
            dualize: false,
            weight_scale: 1.0,
            sense: RotationSense::Positive,
            thetas: None,
            germ: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io("io/read", format!("{}: {e}", path.display())))?;
        cone_ends::fields::io::from_json_str(&text).map_err(|e| CliError::io("parse", format!("{}: {e}", path.display())))
    }

    /// Checks tolerances and resolutions.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        t.core.validate().map_err(|e| CliError::validation("config/tolerance", e))?;
        for (name, v) in [("holonomy", t.holonomy), ("schwarzian", t.schwarzian)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::validation(
                    "config/tolerance",
                    format!("tolerance {name} = {v} must be positive"),
                ));
            }
        }
        let r = &self.resolution;
        if let Some(h) = r.h_grid {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::validation("config/resolution", format!("h_grid = {h} must be positive")));
            }
        }
        if let Some(d) = r.delta_r {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::validation("config/resolution", format!("Δr = {d} must be positive")));
            }
        }
        for (name, n) in [("n", r.samples()), ("n_r", r.radial())] {
            if n < MIN_RESOLUTION {
                return Err(CliError::validation(
                    "config/resolution",
                    format!("{name} = {n} below {MIN_RESOLUTION} samples per direction"),
                ));
            }
        }
        let na = r.angular();
        if na < 8 || !na.is_multiple_of(2) {
            return Err(CliError::validation("config/resolution", format!("n_α = {na} must be even and at least 8")));
        }
        if !(self.weight_scale >= 0.0 && self.weight_scale.is_finite()) {
            return Err(CliError::validation(
                "config/weight",
                format!("weight_scale = {} must be ≥ 0", self.weight_scale),
            ));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of the configuration without the output directory.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { out: None, ..self.clone() };
        let text = cone_ends::fields::io::to_json_string(&canonical).unwrap_or_default();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
