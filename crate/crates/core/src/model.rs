//! The model specification: coefficient functions of the jump-diffusion
//!
//! ```text
//! dX_t = a(X_t, μ) dt + ε b(X_t, σ) dW_t + ε c(X_{t−}, α) dJ_t,   t ∈ [0, 1]
//! ```
//!
//! together with the mark family f_α, parameter boxes, and the transformed
//! jump log-density
//!
//! ```text
//! ψ(x, y, α) = log[ (1/|c(x,α)|) f_α(y / c(x,α)) ]
//! ```
//!
//! which is the building block of the jump contrast and of the
//! jump block of the Fisher information.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jumps::{JumpFamily, SupportKind};
use crate::params::ParamBox;

pub type CoeffFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
pub type CoeffGradFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// How ψ reports a zero density value.
///
/// The contrast sums use `PaperZero` (a vanished density contributes 0 to
/// the sum); posterior targets use `LogDomain` so impossible data kills the
/// whole proposal instead of silently dropping a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiMode {
    PaperZero,
    LogDomain,
}

/// Coefficients, mark family, and parameter boxes of one model.
#[derive(Clone)]
pub struct ModelSpec {
    drift: CoeffFn,
    diffusion: CoeffFn,
    jump_coeff: CoeffFn,
    drift_grad_mu: Option<CoeffGradFn>,
    diffusion_grad_sigma: Option<CoeffGradFn>,
    jump_coeff_grad_alpha: Option<CoeffGradFn>,
    family: JumpFamily,
    sigma_box: ParamBox,
    mu_box: ParamBox,
    alpha_box: ParamBox,
    tail_exponent_override: Option<f64>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("family", &self.family)
            .field("sigma_box", &self.sigma_box)
            .field("mu_box", &self.mu_box)
            .field("alpha_box", &self.alpha_box)
            .finish_non_exhaustive()
    }
}

impl ModelSpec {
    /// Builds a model from its three coefficient functions.  Gradients
    /// default to central finite differences; attach analytic ones with the
    /// `with_*_grad` builders when available.
    pub fn new(
        drift: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        jump_coeff: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        family: JumpFamily,
        sigma_box: ParamBox,
        mu_box: ParamBox,
        alpha_box: ParamBox,
    ) -> Self {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            jump_coeff: Arc::new(jump_coeff),
            drift_grad_mu: None,
            diffusion_grad_sigma: None,
            jump_coeff_grad_alpha: None,
            family,
            sigma_box,
            mu_box,
            alpha_box,
            tail_exponent_override: None,
        }
    }

    /// The linear mean-reverting reference model: a = −μ₁x, b = σ₁, c = 1,
    /// with all parameter boxes `[0.01, 50]` per coordinate.
    pub fn ou(family: JumpFamily) -> Self {
        let alpha_dim = family.alpha_dim();
        Self::new(
            |x, mu: &[f64]| -mu[0] * x,
            |_x, sigma: &[f64]| sigma[0],
            |_x, _alpha: &[f64]| 1.0,
            family,
            ParamBox::cube(0.01, 50.0, 1).expect("static bounds"),
            ParamBox::cube(0.01, 50.0, 1).expect("static bounds"),
            ParamBox::cube(0.01, 50.0, alpha_dim).expect("static bounds"),
        )
        .with_drift_grad(|x, _mu| vec![-x])
        .with_diffusion_grad(|_x, _sigma| vec![1.0])
        .with_jump_coeff_grad(move |_x, _alpha| vec![0.0; alpha_dim])
    }

    pub fn with_drift_grad(mut self, g: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.drift_grad_mu = Some(Arc::new(g));
        self
    }

    pub fn with_diffusion_grad(mut self, g: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.diffusion_grad_sigma = Some(Arc::new(g));
        self
    }

    pub fn with_jump_coeff_grad(mut self, g: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.jump_coeff_grad_alpha = Some(Arc::new(g));
        self
    }

    /// Overrides the mark family's tail exponent q (bounds the one-sided
    /// filter exponent ρ < 1/(4q)).
    pub fn with_tail_exponent(mut self, q: f64) -> Self {
        self.tail_exponent_override = Some(q);
        self
    }

    /// Replaces all three parameter boxes.
    pub fn with_boxes(mut self, sigma_box: ParamBox, mu_box: ParamBox, alpha_box: ParamBox) -> Self {
        self.sigma_box = sigma_box;
        self.mu_box = mu_box;
        self.alpha_box = alpha_box;
        self
    }

    pub fn a(&self, x: f64, mu: &[f64]) -> f64 {
        (self.drift)(x, mu)
    }

    pub fn b(&self, x: f64, sigma: &[f64]) -> f64 {
        (self.diffusion)(x, sigma)
    }

    pub fn c(&self, x: f64, alpha: &[f64]) -> f64 {
        (self.jump_coeff)(x, alpha)
    }

    pub fn da_dmu(&self, x: f64, mu: &[f64]) -> Vec<f64> {
        match &self.drift_grad_mu {
            Some(g) => g(x, mu),
            None => fd_param_grad(|p| (self.drift)(x, p), mu),
        }
    }

    pub fn db_dsigma(&self, x: f64, sigma: &[f64]) -> Vec<f64> {
        match &self.diffusion_grad_sigma {
            Some(g) => g(x, sigma),
            None => fd_param_grad(|p| (self.diffusion)(x, p), sigma),
        }
    }

    pub fn dc_dalpha(&self, x: f64, alpha: &[f64]) -> Vec<f64> {
        match &self.jump_coeff_grad_alpha {
            Some(g) => g(x, alpha),
            None => fd_param_grad(|p| (self.jump_coeff)(x, p), alpha),
        }
    }

    pub fn family(&self) -> &JumpFamily {
        &self.family
    }

    pub fn support(&self) -> SupportKind {
        self.family.support()
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent_override.unwrap_or_else(|| self.family.tail_exponent())
    }

    pub fn sigma_box(&self) -> &ParamBox {
        &self.sigma_box
    }

    pub fn mu_box(&self) -> &ParamBox {
        &self.mu_box
    }

    pub fn alpha_box(&self) -> &ParamBox {
        &self.alpha_box
    }

    /// The transformed jump log-density ψ(x, y, α).
    ///
    /// Returns the sentinel selected by `mode` when the density vanishes at
    /// y/c: `PaperZero` gives 0 (the term drops out of a contrast sum),
    /// `LogDomain` gives −∞ (the term kills a posterior proposal).
    pub fn psi(&self, x: f64, y: f64, alpha: &[f64], mode: PsiMode) -> Result<f64> {
        self.family.check_alpha(alpha)?;
        self.alpha_box.check(alpha, "α")?;
        let c = self.c(x, alpha);
        if c == 0.0 {
            return Err(Error::Domain(format!("jump coefficient c({x}, {alpha:?}) = 0")));
        }
        let log_f = self.family.log_density(y / c, alpha);
        if log_f == f64::NEG_INFINITY {
            return Ok(match mode {
                PsiMode::PaperZero => 0.0,
                PsiMode::LogDomain => f64::NEG_INFINITY,
            });
        }
        Ok(log_f - c.abs().ln())
    }

    /// Gradient of ψ in α.
    ///
    /// With w = y/c, the chain rule gives
    /// ∂ᵢψ = ∂ᵢ log f_α(w) − (∂ᵢc/c)·(1 + w·∂_w log f_α(w)).
    /// Errors when the density vanishes at w (the gradient is undefined
    /// outside the support).
    pub fn dpsi_dalpha(&self, x: f64, y: f64, alpha: &[f64]) -> Result<Vec<f64>> {
        self.family.check_alpha(alpha)?;
        self.alpha_box.check(alpha, "α")?;
        let c = self.c(x, alpha);
        if c == 0.0 {
            return Err(Error::Domain(format!("jump coefficient c({x}, {alpha:?}) = 0")));
        }
        let w = y / c;
        if self.family.log_density(w, alpha) == f64::NEG_INFINITY {
            return Err(Error::Domain(format!(
                "ψ gradient undefined: density vanishes at y/c = {w}"
            )));
        }
        let mut grad = self.family.grad_alpha_log_density(w, alpha);
        let dc = self.dc_dalpha(x, alpha);
        if dc.iter().any(|&d| d != 0.0) {
            let dlog_dw = self.family.dlog_density_dz(w, alpha);
            for (g, d) in grad.iter_mut().zip(&dc) {
                *g -= d / c * (1.0 + w * dlog_dw);
            }
        }
        Ok(grad)
    }

    /// Finite-difference Hessian of ψ in α (symmetrized central differences
    /// of the analytic gradient).  Primarily an observed-information
    /// diagnostic; not used on any hot path.
    pub fn d2psi_dalpha_fd(&self, x: f64, y: f64, alpha: &[f64]) -> Result<Vec<Vec<f64>>> {
        let d = alpha.len();
        let mut h_mat = vec![vec![0.0; d]; d];
        let mut probe = alpha.to_vec();
        for j in 0..d {
            let h = 1e-5 * alpha[j].abs().max(1.0);
            probe[j] = alpha[j] + h;
            let up = self.dpsi_dalpha(x, y, &probe)?;
            probe[j] = alpha[j] - h;
            let down = self.dpsi_dalpha(x, y, &probe)?;
            probe[j] = alpha[j];
            for i in 0..d {
                h_mat[i][j] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        // Symmetrize: mixed partials agree analytically.
        for i in 0..d {
            for j in 0..i {
                let m = 0.5 * (h_mat[i][j] + h_mat[j][i]);
                h_mat[i][j] = m;
                h_mat[j][i] = m;
            }
        }
        Ok(h_mat)
    }

    /// One mark draw from f_α with a dedicated seeded generator.
    pub fn sample_jump(&self, alpha: &[f64], rng_seed: u64) -> Result<f64> {
        self.family.check_alpha(alpha)?;
        self.alpha_box.check(alpha, "α")?;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        Ok(self.family.sample(alpha, &mut rng))
    }
}

/// Central finite-difference gradient of a scalar function of a parameter
/// vector.
fn fd_param_grad<F: Fn(&[f64]) -> f64>(f: F, params: &[f64]) -> Vec<f64> {
    let mut grad = Vec::with_capacity(params.len());
    let mut probe = params.to_vec();
    for i in 0..params.len() {
        let h = 1e-6 * params[i].abs().max(1.0);
        probe[i] = params[i] + h;
        let up = f(&probe);
        probe[i] = params[i] - h;
        let down = f(&probe);
        probe[i] = params[i];
        grad.push((up - down) / (2.0 * h));
    }
    grad
}
