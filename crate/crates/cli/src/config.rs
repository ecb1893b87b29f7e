//! The JSON experiment configuration and its validation.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use jdbayes_core::model::PsiMode;
use jdbayes_core::params::{ParamBox, ParamVector};
use jdbayes_core::{FilterSpec, JumpFamily, MCMCConfig, ModelSpec};

use crate::CliError;

/// One (n, ε) grid cell.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCell {
    pub n: usize,
    pub epsilon: f64,
}

/// Which built-in model to run. Custom coefficient functions are a
/// library-level feature (they are closures); the batch driver only ships
/// the built-in presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelPreset {
    /// Mean-reverting drift −μx, constant diffusion σ, unit jump
    /// coefficient, inverse-Gaussian marks.
    OuIg,
    /// Same coefficients with normal marks.
    OuNormal,
    /// Same coefficients with gamma marks.
    OuGamma,
    /// Rejected at validation with a pointer to the library API.
    Custom,
}

/// Optional replacements for the preset parameter boxes, each a list of
/// [lo, hi] pairs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxOverrides {
    #[serde(default)]
    pub sigma: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub mu: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub alpha: Option<Vec<(f64, f64)>>,
}

fn default_x0() -> f64 {
    1.0
}
fn default_replications() -> usize {
    200
}
fn default_substeps() -> usize {
    10
}
fn default_psi_mode() -> PsiMode {
    PsiMode::LogDomain
}

/// The full experiment description parsed from `exp.json`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelPreset,
    pub theta0: ParamVector,
    #[serde(default = "default_x0")]
    pub x0: f64,
    pub lambda: f64,
    pub grid: Vec<GridCell>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub filter: FilterSpec,
    #[serde(default)]
    pub mcmc: MCMCConfig,
    pub seed: u64,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// How ψ treats data outside the mark support in the α-stage target.
    #[serde(default = "default_psi_mode")]
    pub psi_mode: PsiMode,
    #[serde(default)]
    pub boxes: Option<BoxOverrides>,
    /// Default output directory; the `--out` flag overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub dump_paths: bool,
    #[serde(default)]
    pub dump_chains: bool,
}

impl ExperimentConfig {
    /// Reads and parses the file; JSON problems come back with line and
    /// column positions.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Builds the model (with any box overrides applied) for this config.
    pub fn build_model(&self) -> Result<ModelSpec, CliError> {
        let family = match self.model {
            ModelPreset::OuIg => JumpFamily::InverseGaussian,
            ModelPreset::OuNormal => JumpFamily::Normal,
            ModelPreset::OuGamma => JumpFamily::Gamma,
            ModelPreset::Custom => {
                return Err(CliError::Config(
                    "model preset \"custom\" is not runnable from a JSON config: custom \
                     coefficient functions are closures, available through the library \
                     (ModelSpec::new); pick ou_ig, ou_normal, or ou_gamma here"
                        .into(),
                ))
            }
        };
        let mut model = ModelSpec::ou(family);
        if let Some(boxes) = &self.boxes {
            let build = |bounds: &Option<Vec<(f64, f64)>>, current: &ParamBox, label: &str| {
                match bounds {
                    Some(b) => ParamBox::new(b.clone())
                        .map_err(|e| CliError::Config(format!("boxes.{label}: {e}"))),
                    None => Ok(current.clone()),
                }
            };
            let sigma = build(&boxes.sigma, model.sigma_box(), "sigma")?;
            let mu = build(&boxes.mu, model.mu_box(), "mu")?;
            let alpha = build(&boxes.alpha, model.alpha_box(), "alpha")?;
            model = model.with_boxes(sigma, mu, alpha);
        }
        Ok(model)
    }

    /// Full semantic validation; returns the model on success so callers
    /// never run with an unchecked one.
    pub fn validate(&self) -> Result<ModelSpec, CliError> {
        let cfg_err = |m: String| CliError::Config(m);
        if self.replications == 0 {
            return Err(cfg_err("replications must be >= 1".into()));
        }
        if self.grid.is_empty() {
            return Err(cfg_err("grid must contain at least one (n, epsilon) cell".into()));
        }
        for (i, cell) in self.grid.iter().enumerate() {
            if cell.n == 0 {
                return Err(cfg_err(format!("grid[{i}]: n must be >= 1")));
            }
            if !(cell.epsilon > 0.0) || !cell.epsilon.is_finite() {
                return Err(cfg_err(format!(
                    "grid[{i}]: epsilon must be a finite positive number, got {}",
                    cell.epsilon
                )));
            }
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(cfg_err(format!(
                "lambda must be a finite nonnegative number, got {}",
                self.lambda
            )));
        }
        if !self.x0.is_finite() {
            return Err(cfg_err(format!("x0 must be finite, got {}", self.x0)));
        }
        if self.substeps == 0 {
            return Err(cfg_err("substeps must be >= 1".into()));
        }
        let model = self.build_model()?;
        model
            .sigma_box()
            .check(&self.theta0.sigma, "theta0.sigma")
            .and_then(|_| model.mu_box().check(&self.theta0.mu, "theta0.mu"))
            .and_then(|_| model.alpha_box().check(&self.theta0.alpha, "theta0.alpha"))
            .map_err(|e| cfg_err(e.to_string()))?;
        for (i, cell) in self.grid.iter().enumerate() {
            self.filter
                .validate(cell.n)
                .map_err(|e| cfg_err(format!("filter at grid[{i}] (n = {}): {e}", cell.n)))?;
        }
        self.filter
            .validate_for_tail(model.tail_exponent())
            .map_err(|e| cfg_err(e.to_string()))?;
        self.mcmc.validate().map_err(|e| cfg_err(format!("mcmc: {e}")))?;
        Ok(model)
    }

    /// Stable identifier for a grid cell, used in CSV rows and dump file
    /// names.
    pub fn cell_id(cell: &GridCell) -> String {
        format!("n{}_eps{}", cell.n, cell.epsilon)
    }
}
