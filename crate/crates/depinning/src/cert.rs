//! Constructive certificates for the depinning threshold of one obstacle
//! realization.
//!
//! * [`geometry`] — circular-arc building blocks: obstacle caps (convex
//!   dips pinned inside an obstacle) and concave connector arcs, with the
//!   closed-form feasibility conditions on curvature and junction slopes.
//! * [`barrier`] — a stationary supersolution assembled from caps and
//!   connectors over a 1-Lipschitz selection of occupied cells; certifies
//!   that the front stays below the barrier for all forces up to
//!   `F_certified` (lower bound on the critical force).
//! * [`path`] — an obstacle-free corridor found by lattice search, plus a
//!   traveling subsolution inside it; certifies propagation for all forces
//!   above `tau + 2/h` (upper bound on the critical force).
//! * [`bounds`] — the closed-form density scaling both certificates
//!   target, for reporting alongside the constructed ones.

pub mod barrier;
pub mod bounds;
pub mod geometry;
pub mod path;

pub use barrier::{
    build_barrier, find_lipschitz_selection, max_certifiable_gap, minimal_lipschitz_selection,
    verify_supersolution, Barrier, LowerCert, VerifyReport,
};
pub use bounds::{analytic_bounds, AnalyticBounds};
pub use geometry::{arc_connect, obstacle_cap, ArcSegment};
pub use path::{construct_path_evolution, find_best_path, find_free_path, PathCert, PathEvolution};

use crate::obstacle::ObstacleField;

/// Indices of obstacle centers inside an axis-aligned box whose x-interval
/// is interpreted on the periodic window (`x_hi - x_lo` must not exceed the
/// period).
pub(crate) fn centers_in_box(
    field: &ObstacleField,
    x_lo: f64,
    x_span: f64,
    y_lo: f64,
    y_hi: f64,
) -> Vec<usize> {
    let w = field.domain().width;
    let mut found = Vec::new();
    for (i, c) in field.centers().iter().enumerate() {
        if c[1] < y_lo || c[1] > y_hi {
            continue;
        }
        let dx = (c[0] - x_lo).rem_euclid(w);
        if dx <= x_span {
            found.push(i);
        }
    }
    found
}
