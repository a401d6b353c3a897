use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::entropy_metrics::Variant;
use crate::error::{Error, Result};
use crate::system_model::{compute_constants, ConstantsRecord, FluxModel, ModelName, ModelSpec};
use crate::wave_lab::{Lab, LabOptions};

fn default_m() -> f64 {
    1.0
}
fn default_delta0() -> f64 {
    1.0
}
fn default_variant() -> Variant {
    Variant::General
}
fn default_cells() -> usize {
    1 << 14
}
fn default_samples() -> usize {
    10
}
fn default_subsample() -> usize {
    1 << 16
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Declarative description of one experiment, read from TOML.
///
/// ```toml
/// model = "burgers"        # burgers | cubic | p_system | temple_diagonal
/// L = 1.0
/// M = 0.5
/// T = 0.015625
/// delta0 = 1000.0
/// epsilons = [1e-2, 5e-3, 1e-3]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelName,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub ball_radius: Option<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    /// Mass bound on the initial data.
    #[serde(default = "default_m")]
    pub m: f64,
    /// Amplitude bound on the initial data.
    #[serde(rename = "M")]
    pub big_m: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    /// Strictly decreasing grid of positive `ε`.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default)]
    pub seed: u64,
    /// Random draws for the roundtrip and upper-bound experiments.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Codes drawn when the sawtooth family is too large to enumerate.
    #[serde(default = "default_subsample")]
    pub subsample: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

/// Model, constants and lab built from a config.
pub struct Setup {
    pub model: Arc<dyn FluxModel>,
    pub constants: ConstantsRecord,
    pub lab: Lab,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec { name: self.model, kappa: self.kappa, ball_radius: self.ball_radius }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !(self.t > 0.0) {
            return Err(Error::Config(format!("L and T must be positive (L = {}, T = {})", self.l, self.t)));
        }
        if !(self.m > 0.0) || !(self.big_m > 0.0) || !(self.delta0 > 0.0) {
            return Err(Error::Config("m, M and delta0 must be positive".into()));
        }
        let d_bar = self.ball_radius.unwrap_or_else(|| ModelSpec::default_ball_radius(self.model));
        if !(self.big_m < d_bar) {
            return Err(Error::Config(format!("M = {} must be below the ball radius {d_bar}", self.big_m)));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0)) || self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("epsilons must be positive and strictly decreasing".into()));
        }
        if self.cells < 16 {
            return Err(Error::Config(format!("cells = {} is too coarse", self.cells)));
        }
        Ok(())
    }

    pub fn setup(&self) -> Result<Setup> {
        let model = self.spec().build()?;
        let constants = compute_constants(model.as_ref(), self.delta0, self.l, self.t)?;
        let options = LabOptions { cells: self.cells, ..LabOptions::default() };
        let lab = Lab::with_options(model.clone(), constants.clone(), options)?;
        Ok(Setup { model, constants, lab })
    }
}
