//! The three filtered contrast functions and their "ideal" counterparts
//! built from simulator ground truth.
//!
//! With Δ_k X = X_{t_k} − X_{t_{k−1}}, t_k = k/n:
//!
//! ```text
//! Ψ⁽⁰⁾(μ)    = −½ Σ_k |Δ_k X − a(X_{k−1},μ)/n|² / (ε²/n) · 1_{C_k}
//! Ψ⁽¹⁾(μ,σ) = −½ Σ_k { |Δ_k X − a/n|² / (ε²b²/n) + log b²(X_{k−1},σ) } · 1_{C_k}
//! Ψ⁽²⁾(α)    =    Σ_k ψ(X_{k−1}, Δ_k X/ε, α) · 1_{D_k}
//! ```
//!
//! The ideal variants replace the filter masks by the true jump record:
//! Ψ̃⁽⁰⁾/Ψ̃⁽¹⁾ sum over intervals with no jump, and Ψ̃⁽²⁾ sums
//! ψ(X_{k−1}, c(X_{k−1}, α₀)·V, α) over intervals with exactly one jump of
//! mark V, where α₀ is the generating truth.

use crate::error::{Error, Result};
use crate::filters::FilterMask;
use crate::model::{ModelSpec, PsiMode};
use crate::params::ParamVector;
use crate::simulate::SamplePath;

fn check_shapes(path: &SamplePath, eps: f64, mask: Option<&FilterMask>) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "contrast evaluation needs a finite epsilon > 0, got {eps}"
        )));
    }
    if let Some(mask) = mask {
        if mask.n() != path.n() {
            return Err(Error::InvalidParameter(format!(
                "mask covers {} intervals but the path has {}",
                mask.n(),
                path.n()
            )));
        }
    }
    Ok(())
}

/// Drift contrast Ψ⁽⁰⁾(μ) over the continuous-masked intervals.
pub fn contrast0(
    model: &ModelSpec,
    path: &SamplePath,
    mu: &[f64],
    eps: f64,
    mask: &FilterMask,
) -> Result<f64> {
    check_shapes(path, eps, Some(mask))?;
    model.mu_box().check(mu, "mu")?;
    let n = path.n() as f64;
    let mut sum_sq = 0.0;
    for k in 0..path.n() {
        if mask.is_continuous(k) {
            let x = path.observations[k];
            let r = path.increment(k) - model.a(x, mu) / n;
            sum_sq += r * r;
        }
    }
    Ok(-0.5 * sum_sq * n / (eps * eps))
}

/// Diffusion contrast Ψ⁽¹⁾(μ, σ) over the continuous-masked intervals.
pub fn contrast1(
    model: &ModelSpec,
    path: &SamplePath,
    mu: &[f64],
    sigma: &[f64],
    eps: f64,
    mask: &FilterMask,
) -> Result<f64> {
    check_shapes(path, eps, Some(mask))?;
    model.mu_box().check(mu, "mu")?;
    model.sigma_box().check(sigma, "sigma")?;
    let n = path.n() as f64;
    let mut total = 0.0;
    for k in 0..path.n() {
        if mask.is_continuous(k) {
            let x = path.observations[k];
            let b = model.b(x, sigma);
            if b <= 0.0 {
                return Err(Error::Domain(format!(
                    "diffusion coefficient b({x}, {sigma:?}) = {b} must be positive"
                )));
            }
            let r = path.increment(k) - model.a(x, mu) / n;
            total += r * r * n / (eps * eps * b * b) + (b * b).ln();
        }
    }
    Ok(-0.5 * total)
}

/// Jump contrast Ψ⁽²⁾(α) over the jump-masked intervals.
pub fn contrast2(
    model: &ModelSpec,
    path: &SamplePath,
    alpha: &[f64],
    eps: f64,
    mask: &FilterMask,
    mode: PsiMode,
) -> Result<f64> {
    check_shapes(path, eps, Some(mask))?;
    let mut total = 0.0;
    for k in 0..path.n() {
        if mask.is_jump(k) {
            let x = path.observations[k];
            total += model.psi(x, path.increment(k) / eps, alpha, mode)?;
        }
    }
    Ok(total)
}

/// The three ideal contrasts (Ψ̃⁽⁰⁾, Ψ̃⁽¹⁾, Ψ̃⁽²⁾) at `theta`, using the
/// path's true jump record in place of any filter.
pub fn ideal_contrasts(
    model: &ModelSpec,
    path: &SamplePath,
    theta: &ParamVector,
    eps: f64,
    mode: PsiMode,
) -> Result<(f64, f64, f64)> {
    check_shapes(path, eps, None)?;
    model.mu_box().check(&theta.mu, "mu")?;
    model.sigma_box().check(&theta.sigma, "sigma")?;
    let truth = &path.truth;
    let alpha0 = &truth.theta0.alpha;
    let n = path.n() as f64;
    let (mut sum_sq, mut total1, mut total2) = (0.0, 0.0, 0.0);
    for k in 0..path.n() {
        let x = path.observations[k];
        match truth.jump_count(k) {
            0 => {
                let b = model.b(x, &theta.sigma);
                if b <= 0.0 {
                    return Err(Error::Domain(format!(
                        "diffusion coefficient b({x}, {:?}) = {b} must be positive",
                        theta.sigma
                    )));
                }
                let r = path.increment(k) - model.a(x, &theta.mu) / n;
                sum_sq += r * r;
                total1 += r * r * n / (eps * eps * b * b) + (b * b).ln();
            }
            1 => {
                let v = truth.jumps[k][0].mark;
                let y = model.c(x, alpha0) * v;
                total2 += model.psi(x, y, &theta.alpha, mode)?;
            }
            _ => {}
        }
    }
    Ok((-0.5 * sum_sq * n / (eps * eps), -0.5 * total1, total2))
}
