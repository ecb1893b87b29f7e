//! The noise-free limit path: with ε = 0 the state follows the ODE
//! dx_t/dt = a(x_t, μ₀) started at x₀.  Estimator asymptotics and the
//! Fisher-information integrals are taken along this trajectory.

use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// Overflow guard shared with the stochastic simulator.
pub(crate) const EXPLOSION_LIMIT: f64 = 1e12;

/// Classical fourth-order Runge–Kutta solution of the limit ODE, sampled on
/// the uniform grid t_k = k/grid_n of [0, 1], with ten internal steps per
/// grid interval.
pub fn ode_limit_path(model: &ModelSpec, mu0: &[f64], x0: f64, grid_n: usize) -> Result<Vec<f64>> {
    if grid_n == 0 {
        return Err(Error::InvalidConfig("ode_limit_path needs grid_n >= 1".into()));
    }
    model.mu_box().check(mu0, "μ₀")?;
    const INNER: usize = 10;
    let h = 1.0 / (grid_n as f64 * INNER as f64);
    let f = |x: f64| model.a(x, mu0);

    let mut path = Vec::with_capacity(grid_n + 1);
    path.push(x0);
    let mut x = x0;
    for k in 0..grid_n {
        for j in 0..INNER {
            let k1 = f(x);
            let k2 = f(x + 0.5 * h * k1);
            let k3 = f(x + 0.5 * h * k2);
            let k4 = f(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !x.is_finite() || x.abs() > EXPLOSION_LIMIT {
                return Err(Error::PathExplosion { step: k * INNER + j, limit: EXPLOSION_LIMIT });
            }
        }
        path.push(x);
    }
    Ok(path)
}
