//! Parameter vectors and rectangular parameter boxes.
//!
//! The estimation problem carries three parameter blocks: the diffusion
//! block σ (dimension d1), the drift block μ (dimension d2), and the jump
//! block α (dimension d3).  Priors are uniform over axis-aligned boxes, so a
//! box doubles as both the prior support and the admissible set every
//! estimate is confined to.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box of parameter values: `lo[i] <= u[i] <= hi[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    bounds: Vec<(f64, f64)>,
}

impl ParamBox {
    /// Builds a box from `(lo, hi)` pairs.
    ///
    /// Bounds must be finite with `lo <= hi`; a zero-width coordinate is
    /// allowed and acts as a point mass.
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidParameter("empty parameter box".into()));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "box coordinate {i} has non-finite bounds ({lo}, {hi})"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "box coordinate {i} has lo {lo} > hi {hi}"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// Convenience constructor for a cube `[lo, hi]^dim`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn lo(&self, i: usize) -> f64 {
        self.bounds[i].0
    }

    pub fn hi(&self, i: usize) -> f64 {
        self.bounds[i].1
    }

    pub fn width(&self, i: usize) -> f64 {
        self.bounds[i].1 - self.bounds[i].0
    }

    /// True when `u` has the right dimension and lies inside the closed box.
    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.bounds.len()
            && u.iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    /// Center of the box; also the mean of the uniform prior.
    pub fn midpoint(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// One uniform draw from the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect()
    }

    /// Errors unless `u` lies inside the box.
    pub fn check(&self, u: &[f64], label: &str) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{label} = {u:?} outside its box {:?}",
                self.bounds
            )))
        }
    }
}

/// A full parameter point θ = (σ, μ, α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl ParamVector {
    pub fn new(sigma: Vec<f64>, mu: Vec<f64>, alpha: Vec<f64>) -> Self {
        Self { sigma, mu, alpha }
    }

    /// Total dimension d = d1 + d2 + d3.
    pub fn dim(&self) -> usize {
        self.sigma.len() + self.mu.len() + self.alpha.len()
    }
}
