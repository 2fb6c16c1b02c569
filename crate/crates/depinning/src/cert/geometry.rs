//! Circular-arc segments and their closed-form feasibility conditions.
//!
//! Both certificate constructions assemble curves from three pieces, all
//! graphs over an x-interval:
//!
//! * obstacle caps: convex dips (`y'' > 0`, graph curvature `+F_in`) whose
//!   endpoints sit at the obstacle center height and whose endpoint slopes
//!   are `±r/sqrt(F_in^-2 - r^2)`;
//! * connector arcs: concave bridges (`y'' < 0`, graph curvature `-kappa`)
//!   between cap endpoints;
//! * chords: the zero-curvature limit of either.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A curve segment that is a graph over its x-interval.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcSegment {
    /// Upper branch of a circle: concave, graph curvature `-1/radius`.
    ConnectorArc { center: [f64; 2], radius: f64, x_lo: f64, x_hi: f64 },
    /// Lower branch of a circle: convex, graph curvature `+1/radius`.
    ObstacleCap { center: [f64; 2], radius: f64, x_lo: f64, x_hi: f64 },
    /// Straight segment between two points.
    Chord { start: [f64; 2], end: [f64; 2] },
}

impl ArcSegment {
    pub fn x_lo(&self) -> f64 {
        match *self {
            ArcSegment::ConnectorArc { x_lo, .. } | ArcSegment::ObstacleCap { x_lo, .. } => x_lo,
            ArcSegment::Chord { start, .. } => start[0],
        }
    }

    pub fn x_hi(&self) -> f64 {
        match *self {
            ArcSegment::ConnectorArc { x_hi, .. } | ArcSegment::ObstacleCap { x_hi, .. } => x_hi,
            ArcSegment::Chord { end, .. } => end[0],
        }
    }

    /// Height at `x`; valid on `[x_lo, x_hi]`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ArcSegment::ConnectorArc { center, radius, .. } => {
                let dx = x - center[0];
                center[1] + (radius * radius - dx * dx).max(0.0).sqrt()
            }
            ArcSegment::ObstacleCap { center, radius, .. } => {
                let dx = x - center[0];
                center[1] - (radius * radius - dx * dx).max(0.0).sqrt()
            }
            ArcSegment::Chord { start, end } => {
                if end[0] == start[0] {
                    start[1]
                } else {
                    start[1] + (end[1] - start[1]) * (x - start[0]) / (end[0] - start[0])
                }
            }
        }
    }

    /// Slope `dy/dx` at `x`.
    pub fn slope(&self, x: f64) -> f64 {
        match *self {
            ArcSegment::ConnectorArc { center, radius, .. } => {
                let dx = x - center[0];
                -dx / (radius * radius - dx * dx).max(0.0).sqrt()
            }
            ArcSegment::ObstacleCap { center, radius, .. } => {
                let dx = x - center[0];
                dx / (radius * radius - dx * dx).max(0.0).sqrt()
            }
            ArcSegment::Chord { start, end } => {
                if end[0] == start[0] {
                    0.0
                } else {
                    (end[1] - start[1]) / (end[0] - start[0])
                }
            }
        }
    }

    /// Signed graph curvature `d/dx (y' / sqrt(1 + y'^2))`, constant per
    /// segment: `-1/R` for connectors, `+1/R` for caps, 0 for chords.
    pub fn graph_curvature(&self) -> f64 {
        match *self {
            ArcSegment::ConnectorArc { radius, .. } => -1.0 / radius,
            ArcSegment::ObstacleCap { radius, .. } => 1.0 / radius,
            ArcSegment::Chord { .. } => 0.0,
        }
    }

    pub fn endpoints(&self) -> ([f64; 2], [f64; 2]) {
        let (a, b) = (self.x_lo(), self.x_hi());
        ([a, self.eval(a)], [b, self.eval(b)])
    }
}

/// Endpoint slope magnitude of a cap of half-width `r` and curvature
/// `f_in`: `r / sqrt(f_in^-2 - r^2)`, infinite at `f_in * r = 1`.
pub fn cap_slope(r: f64, f_in: f64) -> f64 {
    let q = f_in * r;
    q / (1.0 - q * q).sqrt()
}

/// Convex cap of curvature `f_in` through `(cx - r, cy)` and `(cx + r, cy)`
/// dipping below the obstacle center `(cx, cy)`. Every point of the cap
/// stays within distance `r` of the center, so the pinning strength along
/// it equals the plateau value whenever `r <= r0`.
///
/// Feasible iff `f_in * r < 1`; at `f_in * r = 1` the endpoint slopes
/// diverge and the cap is rejected.
pub fn obstacle_cap(center: [f64; 2], r: f64, f_in: f64) -> Result<ArcSegment> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParam(format!("cap half-width must be > 0, got {r}")));
    }
    if !(f_in >= 0.0 && f_in.is_finite()) {
        return Err(Error::InvalidParam(format!("cap curvature must be >= 0, got {f_in}")));
    }
    if f_in == 0.0 {
        return Ok(ArcSegment::Chord {
            start: [center[0] - r, center[1]],
            end: [center[0] + r, center[1]],
        });
    }
    if f_in * r > 1.0 {
        return Err(Error::InvalidParam(format!(
            "infeasible cap: f_in * r = {} > 1",
            f_in * r
        )));
    }
    let radius = 1.0 / f_in;
    let lift = (radius * radius - r * r).sqrt();
    let alpha = r / lift;
    if !alpha.is_finite() {
        return Err(Error::InvalidParam(format!(
            "cap slope guard: endpoint slope diverges at f_in * r = {}",
            f_in * r
        )));
    }
    Ok(ArcSegment::ObstacleCap {
        center: [center[0], center[1] + lift],
        radius,
        x_lo: center[0] - r,
        x_hi: center[0] + r,
    })
}

/// Concave arc of curvature `kappa` from `p1` to `p2` (`p1.x < p2.x`),
/// with both endpoint slopes within `[-alpha, alpha]`.
///
/// With `xb = p2.x - p1.x`, `yb = p2.y - p1.y`, the apex offset is
/// `l = xb/2 + yb * sqrt(kappa^-2/(xb^2+yb^2) - 1/4)` and the arc is
///
/// ```text
/// u(x) = sqrt(kappa^-2 - (l-x)^2) - sqrt(kappa^-2 - l^2)
/// ```
///
/// relative to `p1`. Returns `None` when `kappa > 2 xb/(xb^2+yb^2)` (the
/// chord does not fit the circle) or when either endpoint slope exceeds
/// the budget: `kappa*l <= alpha/sqrt(1+alpha^2)` at the left end and
/// `kappa*(xb-l) <= alpha/sqrt(1+alpha^2)` at the right.
pub fn arc_connect(
    p1: [f64; 2],
    p2: [f64; 2],
    kappa: f64,
    alpha: f64,
) -> Result<Option<ArcSegment>> {
    for v in [p1[0], p1[1], p2[0], p2[1], kappa, alpha] {
        if !v.is_finite() {
            return Err(Error::InvalidParam("arc inputs must be finite".into()));
        }
    }
    if !(p1[0] < p2[0]) {
        return Err(Error::InvalidParam(format!(
            "arc endpoints need p1.x < p2.x, got {} and {}",
            p1[0], p2[0]
        )));
    }
    if kappa < 0.0 || alpha < 0.0 {
        return Err(Error::InvalidParam("kappa and alpha must be >= 0".into()));
    }
    if kappa == 0.0 {
        if p1[1] != p2[1] {
            // A chord with nonzero slope still has to respect the budget.
            let s = (p2[1] - p1[1]) / (p2[0] - p1[0]);
            if s.abs() > alpha {
                return Ok(None);
            }
        }
        return Ok(Some(ArcSegment::Chord { start: p1, end: p2 }));
    }
    let xb = p2[0] - p1[0];
    let yb = p2[1] - p1[1];
    let c2 = xb * xb + yb * yb;
    if kappa > 2.0 * xb / c2 {
        return Ok(None);
    }
    let radius = 1.0 / kappa;
    let d2 = radius * radius / c2 - 0.25;
    if d2 < 0.0 {
        return Ok(None);
    }
    let l = 0.5 * xb + yb * d2.sqrt();
    let a_star = alpha / (1.0 + alpha * alpha).sqrt();
    if kappa * l > a_star || kappa * (xb - l) > a_star {
        return Ok(None);
    }
    let drop2 = radius * radius - l * l;
    let far2 = radius * radius - (l - xb) * (l - xb);
    if drop2 <= 0.0 || far2 <= 0.0 {
        return Ok(None);
    }
    Ok(Some(ArcSegment::ConnectorArc {
        center: [p1[0] + l, p1[1] - drop2.sqrt()],
        radius,
        x_lo: p1[0],
        x_hi: p2[0],
    }))
}
