//! Closed-form density scaling of the two certified thresholds.
//!
//! The barrier construction, run at its design point (`F_in = f/2`,
//! `r = min(r0, 2/f)`, occupied-cell probability 15/16 so
//! `C0 = log(16)/rho`), certifies pinning up to a force gap
//!
//! ```text
//! min{ c(r0, f) * sqrt(rho), f/2 },
//! c(r0, f) = sqrt(2) * ((f/2) * min(r0, 2/f))^{3/2} / (4 * sqrt(log 16))
//! ```
//!
//! above `tau`. The corridor construction certifies propagation above a
//! gap `4 * sqrt(rho) / sqrt(-(1/5) * log(p_c))`, where `p_c` is the
//! (non-explicit) stacked-Lipschitz percolation threshold; it enters only
//! this report, as a configurable placeholder, because the constructed
//! certificates are per-realization facts that do not need it.

use crate::error::{Error, Result};
use crate::obstacle::ObstacleParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct AnalyticBounds {
    /// Pinning certified (in the density limit) for F below this.
    pub f_lb: f64,
    /// Propagation certified (in the density limit) for F above this.
    pub f_ub: f64,
    /// The prefactor `c(r0, f)` of the lower gap.
    pub c_lower: f64,
    /// Strength at which `r = min(r0, 2/f)` switches branch.
    pub f_crossover: f64,
    /// Percolation threshold used for the upper gap.
    pub p_c: f64,
}

/// Evaluates both closed-form thresholds for the given obstacle geometry,
/// friction `tau`, and percolation threshold `p_c`.
pub fn analytic_bounds(params: &ObstacleParams, tau: f64, p_c: f64) -> Result<AnalyticBounds> {
    params.validate()?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParam(format!("tau must be >= 0, got {tau}")));
    }
    if !(p_c > 0.0 && p_c < 1.0) {
        return Err(Error::InvalidParam(format!("p_c must lie in (0, 1), got {p_c}")));
    }
    let c_lower = lower_prefactor(params.r0, params.f);
    let gap_lb = (c_lower * params.rho.sqrt()).min(params.f / 2.0);
    let gap_ub = 4.0 * params.rho.sqrt() / (-p_c.ln() / 5.0).sqrt();
    Ok(AnalyticBounds {
        f_lb: tau + gap_lb,
        f_ub: tau + gap_ub,
        c_lower,
        f_crossover: 2.0 / params.r0,
        p_c,
    })
}

/// `c(r0, f) = sqrt(2) * ((f/2) * min(r0, 2/f))^{3/2} / (4 sqrt(log 16))`.
pub fn lower_prefactor(r0: f64, f: f64) -> f64 {
    if f == 0.0 {
        return 0.0;
    }
    let r = r0.min(2.0 / f);
    2.0_f64.sqrt() * (0.5 * f * r).powf(1.5) / (4.0 * 16.0_f64.ln().sqrt())
}
