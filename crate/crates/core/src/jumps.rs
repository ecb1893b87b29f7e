//! Jump-mark distributions: the density family f_α of the compound-Poisson
//! marks, with log-densities, α-gradients, samplers, and integration
//! domains for quadrature.
//!
//! Three families are built in.  Their α-vectors are two-dimensional:
//!
//! * `Normal`: α = (mean, variance), support the full line;
//! * `Gamma`: α = (scale, shape), support the positive half-line;
//! * `InverseGaussian`: α = (mean, shape), support the positive half-line.
//!
//! A `Custom` variant accepts user closures for everything the built-ins
//! derive analytically.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::Distribution;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.8378770664093453;

/// Support of the mark density, which also selects the increment-filter
/// variant: full-line marks use the two-sided threshold, positive marks the
/// one-sided threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportKind {
    FullLine,
    PositiveHalfLine,
}

/// A user-supplied mark family for models beyond the built-ins.
pub struct CustomJump {
    pub name: String,
    pub alpha_dim: usize,
    pub support: SupportKind,
    /// Tail decay exponent q of the density near the support edge; only
    /// used to bound the one-sided filter exponent.
    pub tail_exponent: f64,
    /// log f_α(z); must return −∞ where the density vanishes.
    pub log_density: Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
    /// One draw from f_α.
    pub sample: Box<dyn Fn(&[f64], &mut dyn rand::RngCore) -> f64 + Send + Sync>,
    /// ∂_α log f_α(z); derived by finite differences when absent.
    pub grad_alpha: Option<Box<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>>,
    /// Finite interval carrying all but a negligible sliver of mass, for
    /// quadrature.
    pub integration_domain: Box<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>,
}

/// The mark-density family f_α.
#[derive(Clone)]
pub enum JumpFamily {
    Normal,
    Gamma,
    InverseGaussian,
    Custom(Arc<CustomJump>),
}

impl fmt::Debug for JumpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpFamily::Normal => write!(f, "Normal"),
            JumpFamily::Gamma => write!(f, "Gamma"),
            JumpFamily::InverseGaussian => write!(f, "InverseGaussian"),
            JumpFamily::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl JumpFamily {
    pub fn alpha_dim(&self) -> usize {
        match self {
            JumpFamily::Custom(c) => c.alpha_dim,
            _ => 2,
        }
    }

    pub fn support(&self) -> SupportKind {
        match self {
            JumpFamily::Normal => SupportKind::FullLine,
            JumpFamily::Gamma | JumpFamily::InverseGaussian => SupportKind::PositiveHalfLine,
            JumpFamily::Custom(c) => c.support,
        }
    }

    /// Tail decay exponent q used by the one-sided filter bound ρ < 1/(4q).
    pub fn tail_exponent(&self) -> f64 {
        match self {
            JumpFamily::Custom(c) => c.tail_exponent,
            _ => 1.0,
        }
    }

    /// Validates dimension and family constraints of an α-vector.
    pub fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.alpha_dim() {
            return Err(Error::InvalidParameter(format!(
                "{self:?} family needs {} jump parameters, got {}",
                self.alpha_dim(),
                alpha.len()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite α: {alpha:?}")));
        }
        let ok = match self {
            JumpFamily::Normal => alpha[1] > 0.0,
            JumpFamily::Gamma | JumpFamily::InverseGaussian => alpha[0] > 0.0 && alpha[1] > 0.0,
            JumpFamily::Custom(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "α = {alpha:?} violates the {self:?} family constraints"
            )))
        }
    }

    /// log f_α(z); −∞ where the density vanishes.  Assumes `check_alpha`
    /// passed.
    pub fn log_density(&self, z: f64, alpha: &[f64]) -> f64 {
        match self {
            JumpFamily::Normal => {
                let (mean, var) = (alpha[0], alpha[1]);
                -0.5 * (LN_2PI + var.ln()) - (z - mean) * (z - mean) / (2.0 * var)
            }
            JumpFamily::Gamma => {
                let (scale, shape) = (alpha[0], alpha[1]);
                if z < 0.0 || (z == 0.0 && shape != 1.0) {
                    return f64::NEG_INFINITY;
                }
                if z == 0.0 {
                    // Exponential case: the density's right limit 1/scale.
                    return -scale.ln();
                }
                (shape - 1.0) * z.ln() - z / scale - ln_gamma(shape) - shape * scale.ln()
            }
            JumpFamily::InverseGaussian => {
                if z <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let (mean, shape) = (alpha[0], alpha[1]);
                0.5 * (shape.ln() - LN_2PI - 3.0 * z.ln())
                    - shape * (z - mean) * (z - mean) / (2.0 * mean * mean * z)
            }
            JumpFamily::Custom(c) => (c.log_density)(z, alpha),
        }
    }

    pub fn density(&self, z: f64, alpha: &[f64]) -> f64 {
        self.log_density(z, alpha).exp()
    }

    /// ∂_α log f_α(z).  Only meaningful where the density is positive.
    pub fn grad_alpha_log_density(&self, z: f64, alpha: &[f64]) -> Vec<f64> {
        match self {
            JumpFamily::Normal => {
                let (mean, var) = (alpha[0], alpha[1]);
                let d = z - mean;
                vec![d / var, -0.5 / var + d * d / (2.0 * var * var)]
            }
            JumpFamily::Gamma => {
                let (scale, shape) = (alpha[0], alpha[1]);
                vec![z / (scale * scale) - shape / scale, z.ln() - digamma(shape) - scale.ln()]
            }
            JumpFamily::InverseGaussian => {
                let (mean, shape) = (alpha[0], alpha[1]);
                let d = z - mean;
                vec![
                    shape * d / (mean * mean * mean),
                    0.5 / shape - d * d / (2.0 * mean * mean * z),
                ]
            }
            JumpFamily::Custom(c) => match &c.grad_alpha {
                Some(g) => g(z, alpha),
                None => fd_grad_alpha(|z, a| (c.log_density)(z, a), z, alpha),
            },
        }
    }

    /// ∂_z log f_α(z), needed when the jump coefficient depends on α.
    pub fn dlog_density_dz(&self, z: f64, alpha: &[f64]) -> f64 {
        match self {
            JumpFamily::Normal => -(z - alpha[0]) / alpha[1],
            JumpFamily::Gamma => (alpha[1] - 1.0) / z - 1.0 / alpha[0],
            JumpFamily::InverseGaussian => {
                let (mean, shape) = (alpha[0], alpha[1]);
                -1.5 / z - shape * (z * z - mean * mean) / (2.0 * mean * mean * z * z)
            }
            JumpFamily::Custom(c) => {
                let h = 1e-6 * z.abs().max(1.0);
                ((c.log_density)(z + h, alpha) - (c.log_density)(z - h, alpha)) / (2.0 * h)
            }
        }
    }

    /// One draw from f_α.  Deterministic given the generator state.
    pub fn sample<R: Rng>(&self, alpha: &[f64], rng: &mut R) -> f64 {
        match self {
            JumpFamily::Normal => {
                rand_distr::Normal::new(alpha[0], alpha[1].sqrt())
                    .expect("checked variance")
                    .sample(rng)
            }
            JumpFamily::Gamma => {
                rand_distr::Gamma::new(alpha[1], alpha[0])
                    .expect("checked shape/scale")
                    .sample(rng)
            }
            JumpFamily::InverseGaussian => {
                rand_distr::InverseGaussian::new(alpha[0], alpha[1])
                    .expect("checked mean/shape")
                    .sample(rng)
            }
            JumpFamily::Custom(c) => {
                let mut dyn_rng: &mut dyn rand::RngCore = rng;
                (c.sample)(alpha, &mut dyn_rng)
            }
        }
    }

    /// A finite interval holding all but a negligible (≲ 1e−16 relative)
    /// share of the mass, used as the quadrature window.
    pub fn integration_domain(&self, alpha: &[f64]) -> (f64, f64) {
        match self {
            JumpFamily::Normal => {
                let sd = alpha[1].sqrt();
                (alpha[0] - 12.0 * sd, alpha[0] + 12.0 * sd)
            }
            JumpFamily::Gamma => {
                let (scale, shape) = (alpha[0], alpha[1]);
                (0.0, scale * (shape + 50.0 + 12.0 * shape.sqrt()))
            }
            JumpFamily::InverseGaussian => {
                let (mean, shape) = (alpha[0], alpha[1]);
                // Upper tail decays like exp(−shape·z/(2·mean²)).
                let sd = (mean * mean * mean / shape).sqrt();
                (0.0, mean + 100.0 * mean * mean / shape + 15.0 * sd)
            }
            JumpFamily::Custom(c) => (c.integration_domain)(alpha),
        }
    }
}

/// Central finite-difference gradient in α of a log-density.
fn fd_grad_alpha<F: Fn(f64, &[f64]) -> f64>(f: F, z: f64, alpha: &[f64]) -> Vec<f64> {
    let mut grad = Vec::with_capacity(alpha.len());
    let mut probe = alpha.to_vec();
    for i in 0..alpha.len() {
        let h = 1e-6 * alpha[i].abs().max(1.0);
        probe[i] = alpha[i] + h;
        let up = f(z, &probe);
        probe[i] = alpha[i] - h;
        let down = f(z, &probe);
        probe[i] = alpha[i];
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadSpec};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn probes(family: &JumpFamily) -> Vec<Vec<f64>> {
        match family {
            JumpFamily::Normal => vec![
                vec![0.0, 1.0],
                vec![2.0, 0.5],
                vec![-1.0, 4.0],
                vec![0.3, 0.01],
                vec![5.0, 9.0],
            ],
            // Gamma shapes stay >= 1: below that the density is unbounded
            // at the origin and outside the admissible parameter set.
            JumpFamily::Gamma => vec![
                vec![1.0, 2.0],
                vec![0.5, 2.0],
                vec![2.0, 1.0],
                vec![1.2, 1.5],
                vec![0.7, 3.0],
            ],
            _ => vec![
                vec![1.0, 2.0],
                vec![0.5, 2.0],
                vec![2.0, 1.0],
                vec![1.2, 0.5],
                vec![0.7, 3.0],
            ],
        }
    }

    #[test]
    fn densities_are_normalized() {
        for family in [JumpFamily::Normal, JumpFamily::Gamma, JumpFamily::InverseGaussian] {
            for alpha in probes(&family) {
                let (lo, hi) = family.integration_domain(&alpha);
                let mass = integrate(
                    |z| family.density(z, &alpha),
                    lo,
                    hi,
                    &QuadSpec::default(),
                    "normalization",
                )
                .unwrap();
                assert_relative_eq!(mass, 1.0, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn gamma_log_density_matches_oracle() {
        // log f at z = 0.9, scale 0.5, shape 2, from a high-precision script.
        let got = JumpFamily::Gamma.log_density(0.9, &[0.5, 2.0]);
        assert_relative_eq!(got, -0.519066154537935682, max_relative = 1e-14);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let cases = [
            (JumpFamily::Normal, vec![(0.7, vec![0.2, 0.8]), (-1.3, vec![-0.5, 2.0])]),
            (JumpFamily::Gamma, vec![(1.0, vec![1.0, 2.0]), (0.4, vec![0.5, 3.0])]),
            (JumpFamily::InverseGaussian, vec![(1.2, vec![1.2, 0.5]), (0.3, vec![2.0, 4.0])]),
        ];
        for (family, points) in cases {
            for (z, alpha) in points {
                let analytic = family.grad_alpha_log_density(z, &alpha);
                let fd = fd_grad_alpha(|z, a| family.log_density(z, a), z, &alpha);
                for (a, f) in analytic.iter().zip(&fd) {
                    assert_relative_eq!(a, f, max_relative = 1e-5);
                }
            }
        }
    }

    #[test]
    fn z_derivative_matches_finite_differences() {
        for (family, z, alpha) in [
            (JumpFamily::Normal, 0.9, vec![0.2, 0.8]),
            (JumpFamily::Gamma, 1.7, vec![0.5, 3.0]),
            (JumpFamily::InverseGaussian, 0.8, vec![1.2, 0.5]),
        ] {
            let analytic = family.dlog_density_dz(z, &alpha);
            let h = 1e-6;
            let fd = (family.log_density(z + h, &alpha) - family.log_density(z - h, &alpha)) / (2.0 * h);
            assert_relative_eq!(analytic, fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn normal_sample_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let family = JumpFamily::Normal;
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| family.sample(&[0.0, 1.0], &mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "sample mean {mean} too far from 0");
    }

    #[test]
    fn gamma_samples_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let family = JumpFamily::Gamma;
        assert!((0..10_000).all(|_| family.sample(&[1.0, 2.0], &mut rng) > 0.0));
    }

    #[test]
    fn inverse_gaussian_sample_mean() {
        // Mean is α₁ and variance α₁³/α₂ = 3.456 at α = (1.2, 0.5).
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let family = JumpFamily::InverseGaussian;
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| family.sample(&[1.2, 0.5], &mut rng)).sum::<f64>() / n as f64;
        let se = (3.456f64 / n as f64).sqrt();
        assert!((mean - 1.2).abs() < 4.0 * se, "sample mean {mean} too far from 1.2");
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for family in [JumpFamily::Normal, JumpFamily::Gamma, JumpFamily::InverseGaussian] {
            let alpha = probes(&family).pop().unwrap();
            for _ in 0..1000 {
                let z = family.sample(&alpha, &mut rng);
                assert!(
                    family.log_density(z, &alpha) > f64::NEG_INFINITY,
                    "{family:?} drew {z} outside its own support"
                );
            }
        }
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(JumpFamily::Normal.check_alpha(&[0.0, 0.0]).is_err());
        assert!(JumpFamily::Gamma.check_alpha(&[-1.0, 2.0]).is_err());
        assert!(JumpFamily::InverseGaussian.check_alpha(&[1.0]).is_err());
        assert!(JumpFamily::Normal.check_alpha(&[f64::NAN, 1.0]).is_err());
        assert!(JumpFamily::Normal.check_alpha(&[0.0, 1.0]).is_ok());
    }
}
