//! Free-corridor certificates: per-realization upper bounds.
//!
//! A vertical corridor of side-`h` cubes whose `r1`-dilations contain no
//! obstacle center has `phi = 0` throughout, so an explicit expanding
//! subsolution (bulge, climb, rotated cap) traverses it whenever
//! `F > tau + 2/h`: curvature along the family never exceeds `2/h` and the
//! normal speed never exceeds the chosen climb rate `v0`. A found corridor
//! therefore certifies `F_crit <= tau + 2/h` for this realization.
//!
//! The cube grid is `n_cols = floor(width/h)` columns of width
//! `width/n_cols >= h` (the window must tile periodically) by rows of
//! height exactly `h`; the certified threshold uses the vertical side `h`,
//! which is never larger than the column width, so the bulge of diameter
//! `h` fits regardless.

use crate::config::CertSettings;
use crate::error::{Error, Result};
use crate::front::KineticRelation;
use crate::obstacle::ObstacleField;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// A verified free corridor: cube path from the row containing `y = 0` to
/// the top of the generated band, moving only left, right, or up.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PathCert {
    /// Vertical cube side; sets the threshold.
    pub h: f64,
    /// Horizontal cube side, `width / n_cols >= h`.
    pub h_x: f64,
    pub n_cols: usize,
    pub rows: usize,
    /// (column, row) cubes, bottom row first; columns are periodic.
    pub cells: Vec<[u32; 2]>,
    /// Certified threshold `tau + 2/h`.
    pub f_ub: f64,
    pub tau: f64,
    /// Whether `2 r1` clears the percolation-scale cube side
    /// `sqrt(-ln(p_c)/5) / sqrt(rho)`; reported, not enforced.
    pub dilation_margin_ok: bool,
    /// Climb rate of the constructed evolution, once one is built.
    pub v0: Option<f64>,
}

/// Margin report for one labeled piece of the evolution.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhaseReport {
    pub label: String,
    pub samples: usize,
    pub min_margin: f64,
    /// Time and abscissa where the minimum was attained.
    pub at_t: f64,
    pub at_x: f64,
}

/// Sampled subsolution family with its pointwise speed-law margins.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PathEvolution {
    pub h: f64,
    pub v0: f64,
    pub f_total: f64,
    pub tau: f64,
    pub epsilon: f64,
    /// Bulge lifetime `h / (2 v0)`: the apex height reaches `h/2`.
    pub t_star: f64,
    /// Curvature at `t_star`; equals `2/h` up to roundoff.
    pub kappa_peak: f64,
    pub phases: Vec<PhaseReport>,
    pub min_margin: f64,
    pub pass: bool,
}

fn cube_open(field: &ObstacleField, h_x: f64, h: f64, k: usize, j: usize) -> bool {
    let r1 = field.params().r1;
    super::centers_in_box(
        field,
        k as f64 * h_x - r1,
        h_x + 2.0 * r1,
        j as f64 * h - r1,
        (j as f64 + 1.0) * h + r1,
    )
    .is_empty()
}

/// Exact point-to-cube distance check for every center; the open-grid test
/// already implies it (box dilation contains the Euclidean one), so a
/// failure here is a defect.
fn recheck_cells(field: &ObstacleField, h_x: f64, h: f64, cells: &[[u32; 2]]) -> Result<()> {
    let width = field.domain().width;
    let r1sq = field.params().r1 * field.params().r1;
    for &[k, j] in cells {
        let x_lo = k as f64 * h_x;
        let (y_lo, y_hi) = (j as f64 * h, (j as f64 + 1.0) * h);
        for c in field.centers() {
            let dxp = (c[0] - x_lo).rem_euclid(width);
            let dx = if dxp <= h_x { 0.0 } else { (dxp - h_x).min(width - dxp) };
            let dy = (y_lo - c[1]).max(c[1] - y_hi).max(0.0);
            if dx * dx + dy * dy < r1sq {
                return Err(Error::InvalidParam(format!(
                    "free-path recheck failed at cube ({k}, {j}): center ({}, {})",
                    c[0], c[1]
                )));
            }
        }
    }
    Ok(())
}

/// Searches for a free corridor of cube side `h` from the bottom row to
/// the top of the generated band. Breadth-first search over open cubes
/// with moves left, right (periodic), and up; the returned path is simple.
pub fn find_free_path(
    field: &ObstacleField,
    h: f64,
    tau: f64,
    cert: &CertSettings,
) -> Result<Option<PathCert>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParam(format!("cube side must be > 0, got {h}")));
    }
    cert.validate()?;
    let p = *field.params();
    let width = field.domain().width;
    let n_cols = (width / h).floor() as usize;
    if n_cols == 0 {
        return Ok(None);
    }
    let h_x = width / n_cols as f64;
    if h_x + 2.0 * p.r1 >= width {
        return Ok(None);
    }
    // Rows whose dilation stays inside the generated band.
    let top = field.domain().y_max - p.r1;
    let rows = (top / h).floor() as usize;
    if rows < 1 {
        return Ok(None);
    }

    let idx = |k: usize, j: usize| j * n_cols + k;
    let mut seen = vec![false; n_cols * rows];
    let mut parent = vec![u32::MAX; n_cols * rows];
    let mut queue = VecDeque::new();
    for k in 0..n_cols {
        if cube_open(field, h_x, h, k, 0) {
            seen[idx(k, 0)] = true;
            queue.push_back((k, 0usize));
        }
    }
    let mut goal = None;
    'bfs: while let Some((k, j)) = queue.pop_front() {
        if j + 1 == rows {
            goal = Some((k, j));
            break 'bfs;
        }
        let steps = [
            ((k + 1) % n_cols, j),
            ((k + n_cols - 1) % n_cols, j),
            (k, j + 1),
        ];
        for (nk, nj) in steps {
            if !seen[idx(nk, nj)] && cube_open(field, h_x, h, nk, nj) {
                seen[idx(nk, nj)] = true;
                parent[idx(nk, nj)] = idx(k, j) as u32;
                queue.push_back((nk, nj));
            }
        }
    }
    let Some((mut k, mut j)) = goal else {
        return Ok(None);
    };
    let mut cells = vec![[k as u32, j as u32]];
    while parent[idx(k, j)] != u32::MAX {
        let p = parent[idx(k, j)] as usize;
        k = p % n_cols;
        j = p / n_cols;
        cells.push([k as u32, j as u32]);
    }
    cells.reverse();
    recheck_cells(field, h_x, h, &cells)?;

    let percolation_side = (-(cert.p_c.ln()) / 5.0).sqrt() / p.rho.sqrt();
    Ok(Some(PathCert {
        h,
        h_x,
        n_cols,
        rows,
        cells,
        f_ub: tau + 2.0 / h,
        tau,
        dilation_margin_ok: 2.0 * p.r1 < percolation_side,
        v0: None,
    }))
}

/// Tries cube sides from `h_max` downward (ratio `1/sqrt(2)`, 16 rungs)
/// and returns the first corridor found: the largest feasible `h` gives
/// the smallest threshold `tau + 2/h`. Extends the band to `y_top` first
/// so every rung searches the same region.
pub fn find_best_path(
    field: &mut ObstacleField,
    h_max: f64,
    y_top: f64,
    tau: f64,
    cert: &CertSettings,
) -> Result<Option<PathCert>> {
    if !(h_max > 0.0 && h_max.is_finite()) {
        return Err(Error::InvalidParam(format!("ladder start must be > 0, got {h_max}")));
    }
    field.extend_band(field.band_required(y_top))?;
    for rung in 0..16 {
        let h = h_max / 2f64.powf(rung as f64 / 2.0);
        if let Some(cert_found) = find_free_path(field, h, tau, cert)? {
            return Ok(Some(cert_found));
        }
    }
    Ok(None)
}

/// Builds and checks the explicit subsolution that traverses a corridor:
/// a nucleation bulge pinned at `(+-h/2, 0)` whose apex rises at `v0`, a
/// translating semicircular cap with straight walls, and the rotated cap
/// used when the corridor turns. At every sampled point the speed-law
/// margin `F - tau - kappa - epsilon * v_n` is recorded; curvature never
/// exceeds `2/h` and normal speed never exceeds `v0`, so the margins are
/// nonnegative exactly when the preconditions hold.
pub fn construct_path_evolution(
    path: &PathCert,
    f_total: f64,
    v0: f64,
    kin: &KineticRelation,
) -> Result<PathEvolution> {
    kin.validate()?;
    let h = path.h;
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(Error::InvalidParam(format!("climb rate must be > 0, got {v0}")));
    }
    if !(f_total > kin.tau + 2.0 / h) {
        return Err(Error::InvalidParam(format!(
            "force {f_total} must exceed tau + 2/h = {}",
            kin.tau + 2.0 / h
        )));
    }
    if !(kin.epsilon * v0 + kin.tau <= f_total - 2.0 / h) {
        return Err(Error::InvalidParam(format!(
            "climb rate too fast: epsilon*v0 + tau = {} exceeds F - 2/h = {}",
            kin.epsilon * v0 + kin.tau,
            f_total - 2.0 / h
        )));
    }
    let q = 0.5 * h;
    let t_star = h / (2.0 * v0);
    let margin = |kappa: f64, v_n: f64| f_total - kin.tau - kappa - kin.epsilon * v_n;

    let mut phases = Vec::new();
    let mut track = |label: &str, pts: &[(f64, f64, f64, f64)]| {
        // (t, x, kappa, v_n) triples sampled along one phase.
        let mut min_margin = f64::INFINITY;
        let (mut at_t, mut at_x) = (0.0, 0.0);
        for &(t, x, kappa, v_n) in pts {
            let m = margin(kappa, v_n);
            if m < min_margin {
                min_margin = m;
                at_t = t;
                at_x = x;
            }
        }
        phases.push(PhaseReport {
            label: label.to_string(),
            samples: pts.len(),
            min_margin,
            at_t,
            at_x,
        });
    };

    // Nucleation: circles through (+-q, 0), apex at height v0*t. The
    // radius shrinks toward q, so the boundary speed splits into the
    // apex-rise part and the shrink part; both stay below v0.
    let mut pts = Vec::new();
    let nt = 48;
    let nx = 33;
    for i in 0..nt {
        let t = t_star * (i as f64 + 0.5) / nt as f64;
        let r = (v0 * v0 * t * t + q * q) / (2.0 * v0 * t);
        let rdot = (v0 * v0 * t * t - q * q) / (2.0 * v0 * t * t);
        let kappa = 1.0 / r;
        for m in 0..=nx {
            let x = q * (2.0 * m as f64 / nx as f64 - 1.0);
            let nu_y = (r * r - x * x).max(0.0).sqrt() / r;
            let v_n = rdot * (1.0 - nu_y) + v0 * nu_y;
            pts.push((t, x, kappa, v_n));
        }
    }
    track("nucleation bulge", &pts);

    // Climb: semicircular cap of radius q translating upward at v0 with
    // straight vertical walls (zero curvature, zero normal speed).
    pts.clear();
    for m in 0..=nx {
        let x = q * (2.0 * m as f64 / nx as f64 - 1.0);
        let nu_y = (q * q - x * x).max(0.0).sqrt() / q;
        pts.push((t_star, x, 1.0 / q, v0 * nu_y));
    }
    pts.push((t_star, q, 0.0, 0.0));
    track("translating cap", &pts);

    // Turns: the cap rotates into a horizontal move; curvature stays 2/h
    // and the frame speed is still bounded by v0, checked with the
    // conservative envelope v_n = v0.
    pts.clear();
    for m in 0..=16 {
        let theta = std::f64::consts::FRAC_PI_2 * m as f64 / 16.0;
        pts.push((t_star, q * theta.cos(), 1.0 / q, v0));
    }
    track("rotated cap", &pts);

    let kappa_peak = 2.0 * v0 * t_star / (v0 * v0 * t_star * t_star + q * q);
    let min_margin = phases.iter().map(|p| p.min_margin).fold(f64::INFINITY, f64::min);
    Ok(PathEvolution {
        h,
        v0,
        f_total,
        tau: kin.tau,
        epsilon: kin.epsilon,
        t_star,
        kappa_peak,
        phases,
        min_margin,
        pass: min_margin >= 0.0 && min_margin.is_finite(),
    })
}
