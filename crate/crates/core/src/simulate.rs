//! Euler–Maruyama simulation of the jump-diffusion with a complete
//! ground-truth record.
//!
//! Each observation interval [t_{k−1}, t_k] of width 1/n is split into
//! `substeps` Euler substeps.  Jump epochs are drawn as an exact Poisson
//! process on [0, 1] (exponential inter-arrivals), and every mark lands in
//! the substep containing its epoch, with all coefficients evaluated at the
//! substep's left endpoint — the left-limit form of the jump integrand.
//!
//! The ground truth keeps every random input (jump times, marks, Brownian
//! substep normals), so the observation sequence can be replayed bit-exactly
//! and the true interval classification (no jump / one jump / several) is
//! available to the test oracles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::ode::EXPLOSION_LIMIT;
use crate::params::ParamVector;
use crate::seed;

/// Simulation controls for one path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Observation count: the path is observed at t_k = k/n, k = 0..n.
    pub n: usize,
    /// Small-noise scale ε ≥ 0 (0 gives the deterministic limit).
    pub epsilon: f64,
    /// Poisson jump intensity λ ≥ 0.
    pub lambda: f64,
    /// Initial state X_0.
    pub x0: f64,
    /// Euler substeps per observation interval.
    pub substeps: usize,
    /// Master seed; jump and Brownian streams are derived from it.
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, epsilon: f64, lambda: f64, x0: f64, seed: u64) -> Result<Self> {
        let cfg = Self { n, epsilon, lambda, x0, substeps: 10, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_substeps(mut self, substeps: usize) -> Result<Self> {
        self.substeps = substeps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("observation count n must be >= 1".into()));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("ε must be finite and >= 0, got {}", self.epsilon)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig(format!("λ must be finite and >= 0, got {}", self.lambda)));
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidConfig("x0 must be finite".into()));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// One jump of the driving compound Poisson process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    /// Epoch in (0, 1].
    pub time: f64,
    /// Mark V drawn from f_{α₀}.
    pub mark: f64,
}

/// Every random input behind a simulated path, plus the generating
/// parameters — enough to replay the Euler recursion exactly and to build
/// the true interval classification.
#[derive(Debug, Clone)]
pub struct PathTruth {
    pub theta0: ParamVector,
    pub x0: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub substeps: usize,
    /// Jumps per observation interval, epoch-ordered.
    pub jumps: Vec<Vec<JumpEvent>>,
    /// Standard normals per interval and substep.
    pub brownian: Vec<Vec<f64>>,
}

impl PathTruth {
    pub fn n(&self) -> usize {
        self.jumps.len()
    }

    /// ΔN_k: jumps in interval k (0-based).
    pub fn jump_count(&self, k: usize) -> usize {
        self.jumps[k].len()
    }

    pub fn total_jumps(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }

    /// True no-jump interval indicator (the J_{k,0} class).
    pub fn is_no_jump(&self, k: usize) -> bool {
        self.jumps[k].is_empty()
    }

    /// True single-jump interval indicator (the J_{k,1} class).
    pub fn is_single_jump(&self, k: usize) -> bool {
        self.jumps[k].len() == 1
    }
}

/// A simulated path: observations on the uniform grid plus ground truth.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub observations: Vec<f64>,
    pub truth: PathTruth,
}

impl SamplePath {
    pub fn n(&self) -> usize {
        self.observations.len() - 1
    }

    pub fn x0(&self) -> f64 {
        self.observations[0]
    }

    /// Δ_k X = X_{t_k} − X_{t_{k−1}} for k = 1..=n (0-based argument).
    pub fn increment(&self, k: usize) -> f64 {
        self.observations[k + 1] - self.observations[k]
    }
}

/// Simulates one path of the jump-diffusion under `theta0`.
pub fn simulate_path(model: &ModelSpec, theta0: &ParamVector, cfg: &SimConfig) -> Result<SamplePath> {
    cfg.validate()?;
    model.sigma_box().check(&theta0.sigma, "σ₀")?;
    model.mu_box().check(&theta0.mu, "μ₀")?;
    model.alpha_box().check(&theta0.alpha, "α₀")?;
    model.family().check_alpha(&theta0.alpha)?;

    // Independent derived streams: jumps (epochs and marks interleaved) and
    // Brownian substep normals.
    let mut jump_rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, &[0]));
    let mut bm_rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, &[1]));

    let n = cfg.n;
    let mut jumps: Vec<Vec<JumpEvent>> = vec![Vec::new(); n];
    if cfg.lambda > 0.0 {
        let exp = rand_distr::Exp::new(cfg.lambda).expect("validated λ > 0");
        let mut t = exp.sample(&mut jump_rng);
        while t <= 1.0 {
            let mark = model.family().sample(&theta0.alpha, &mut jump_rng);
            // Epoch t lands in interval k with t ∈ ((k−1)/n, k/n].
            let k = ((t * n as f64).ceil() as usize).clamp(1, n) - 1;
            jumps[k].push(JumpEvent { time: t, mark });
            t += exp.sample(&mut jump_rng);
        }
    }

    let normal = rand_distr::StandardNormal;
    let brownian: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..cfg.substeps).map(|_| normal.sample(&mut bm_rng)).collect())
        .collect();

    let truth = PathTruth {
        theta0: theta0.clone(),
        x0: cfg.x0,
        epsilon: cfg.epsilon,
        lambda: cfg.lambda,
        substeps: cfg.substeps,
        jumps,
        brownian,
    };
    let observations = replay(model, &truth)?;
    Ok(SamplePath { observations, truth })
}

/// Runs the Euler recursion over a recorded ground truth.
///
/// This is the single source of the path arithmetic: `simulate_path` builds
/// its observations through this function, so replaying a truth always
/// reproduces them bit-exactly.
pub fn replay(model: &ModelSpec, truth: &PathTruth) -> Result<Vec<f64>> {
    let n = truth.n();
    let m = truth.substeps;
    let h = 1.0 / n as f64;
    let tau = h / m as f64;
    let sqrt_tau = tau.sqrt();
    let eps = truth.epsilon;
    let theta = &truth.theta0;

    let mut observations = Vec::with_capacity(n + 1);
    observations.push(truth.x0);
    let mut x = truth.x0;
    for k in 0..n {
        let t_left = k as f64 * h;
        let events = &truth.jumps[k];
        let mut next_event = 0usize;
        for j in 0..m {
            // Marks whose epoch falls in (t_left + j·τ, t_left + (j+1)·τ].
            // The substep windows tile the interval, so walking the sorted
            // events with a cursor attributes each mark exactly once.
            let window_end = if j + 1 == m { (k + 1) as f64 * h } else { t_left + (j + 1) as f64 * tau };
            let mut mark_sum = 0.0;
            while next_event < events.len() && events[next_event].time <= window_end {
                mark_sum += events[next_event].mark;
                next_event += 1;
            }
            let a = model.a(x, &theta.mu);
            let b = model.b(x, &theta.sigma);
            let c = model.c(x, &theta.alpha);
            x += a * tau + eps * b * sqrt_tau * truth.brownian[k][j] + eps * c * mark_sum;
            if !x.is_finite() || x.abs() > EXPLOSION_LIMIT {
                return Err(Error::PathExplosion { step: k * m + j, limit: EXPLOSION_LIMIT });
            }
        }
        debug_assert_eq!(next_event, events.len(), "every mark must land in a substep");
        observations.push(x);
    }
    Ok(observations)
}
