//! Explicit dynamics of the front in graph form.
//!
//! The interface is a periodic graph `y = u(x, t)` on `n` nodes. Each step
//! solves the pointwise inclusion
//!
//! ```text
//! eps * v + (tau + phi) * sgn(v)  ∋  kappa + F
//! ```
//!
//! for the normal velocity `v` by the dry-friction shrinkage (soft
//! threshold), where `kappa` is the discrete graph curvature
//! `(g(s_{i+1/2}) - g(s_{i-1/2})) / dx` with `g(s) = s / sqrt(1 + s^2)`,
//! and then advances the height by `dt * v * sqrt(1 + s_c^2)` using the
//! centered slope `s_c` (normal velocity converted to a vertical rate).
//!
//! Sticking is exact: a node with `|kappa + F| <= tau + phi` has velocity
//! exactly zero, so pinned states are detected by equality, not tolerance.
//! A run classifies as `Pinned` (all velocities zero for a confirmation
//! streak), `Ballistic` (the whole front passed the escape height), or
//! `Undecided` (time budget exhausted, or progress provably too slow to
//! reach the escape height in budget when stall detection is enabled).

use crate::error::{Error, Result};
use crate::obstacle::ObstacleField;
use serde::{Deserialize, Serialize};

/// Rate-independent kinetic relation: viscosity `epsilon` and dry-friction
/// threshold `tau`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KineticRelation {
    pub epsilon: f64,
    pub tau: f64,
}

impl Default for KineticRelation {
    fn default() -> Self {
        KineticRelation { epsilon: 1.0, tau: 0.0 }
    }
}

impl KineticRelation {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParam(format!("tau must be >= 0, got {}", self.tau)));
        }
        Ok(())
    }
}

/// Dry-friction proximal step: the unique `v` with
/// `epsilon v + lambda sgn(v) ∋ b` (shrinkage / soft threshold).
/// Sticking (`v = 0`) holds exactly iff `|b| <= lambda`.
#[inline]
pub fn prox_dry_friction(b: f64, lambda: f64, epsilon: f64) -> f64 {
    if b > lambda {
        (b - lambda) / epsilon
    } else if b < -lambda {
        (b + lambda) / epsilon
    } else {
        0.0
    }
}

/// Periodic front state: node `i` sits at `x = x_offset + i * dx`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FrontState {
    pub heights: Vec<f64>,
    pub dx: f64,
    pub time: f64,
    pub x_offset: f64,
}

impl FrontState {
    /// Flat front at height 0 on `n` nodes.
    pub fn flat(n: usize, dx: f64) -> Self {
        FrontState { heights: vec![0.0; n], dx, time: 0.0, x_offset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.heights.len() < 8 {
            return Err(Error::InvalidParam(format!(
                "need at least 8 nodes, got {}",
                self.heights.len()
            )));
        }
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::InvalidParam(format!("dx must be > 0, got {}", self.dx)));
        }
        if self.heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::NonFinite("front heights"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.heights.len()
    }

    /// Periodic width spanned by the node grid.
    pub fn width(&self) -> f64 {
        self.n() as f64 * self.dx
    }

    #[inline]
    pub fn x_of(&self, i: usize) -> f64 {
        self.x_offset + i as f64 * self.dx
    }

    /// Discrete graph curvature at node `i` (periodic neighbors):
    /// `(g(s_{i+1/2}) - g(s_{i-1/2})) / dx` with `g(s) = s/sqrt(1+s^2)`.
    /// A shallow circular cap of radius R sampled on the grid yields
    /// `-1/R + O(dx^2)`.
    pub fn curvature_at(&self, i: usize) -> f64 {
        let n = self.n();
        let up = self.heights[(i + 1) % n];
        let um = self.heights[(i + n - 1) % n];
        let u = self.heights[i];
        let sp = (up - u) / self.dx;
        let sm = (u - um) / self.dx;
        (g_slope(sp) - g_slope(sm)) / self.dx
    }
}

#[inline]
fn g_slope(s: f64) -> f64 {
    s / (1.0 + s * s).sqrt()
}

/// Time-stepping configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SimConfig {
    /// Time step; must satisfy `dt <= 0.25 * epsilon * dx^2`.
    pub dt: f64,
    /// Time budget; exceeding it classifies the run `Undecided`.
    pub t_max: f64,
    /// Escape height: `Ballistic` once `min_i u_i >= h_ballistic`.
    pub h_ballistic: f64,
    /// Consecutive all-stuck steps required to declare `Pinned`.
    pub pinned_confirm_steps: u32,
    /// Velocities with `|v| <= tol_v` count as stuck (0 = exact).
    pub tol_v: f64,
    /// Abort when any half-slope magnitude exceeds this cap.
    pub slope_max: f64,
    /// Early `Undecided` when the recent pace cannot reach the escape
    /// height within the remaining budget (saves deep near-critical runs;
    /// the classification agrees with running out the clock).
    pub stall_check: bool,
}

impl SimConfig {
    /// Defaults for a grid spacing `dx`: CFL factor 0.2, slope cap 10,
    /// exact sticking, confirmation streak 20.
    pub fn for_grid(dx: f64, kin: &KineticRelation, h_ballistic: f64, t_max: f64) -> Self {
        SimConfig {
            dt: 0.2 * kin.epsilon * dx * dx,
            t_max,
            h_ballistic,
            pinned_confirm_steps: 20,
            tol_v: 0.0,
            slope_max: 10.0,
            stall_check: true,
        }
    }

    pub fn validate(&self, dx: f64, kin: &KineticRelation) -> Result<()> {
        if !(self.dt > 0.0) || self.dt > 0.25 * kin.epsilon * dx * dx * (1.0 + 1e-12) {
            return Err(Error::InvalidParam(format!(
                "dt {} violates dt <= 0.25 * epsilon * dx^2 = {}",
                self.dt,
                0.25 * kin.epsilon * dx * dx
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParam(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if !(self.h_ballistic > 0.0 && self.h_ballistic.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "h_ballistic must be > 0, got {}",
                self.h_ballistic
            )));
        }
        if self.pinned_confirm_steps == 0 {
            return Err(Error::InvalidParam("pinned_confirm_steps must be >= 1".into()));
        }
        if !(self.tol_v >= 0.0) || !(self.slope_max > 0.0) {
            return Err(Error::InvalidParam("tol_v >= 0 and slope_max > 0 required".into()));
        }
        Ok(())
    }
}

/// Classification of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeTag {
    Pinned,
    Ballistic,
    Undecided,
}

/// Result of a run, with summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    pub tag: OutcomeTag,
    /// Time at which the classification fired.
    pub t_decided: f64,
    pub steps: u64,
    /// Mean vertical velocity over the final ~20% (ballistic runs).
    pub mean_velocity: Option<f64>,
    pub final_mean_height: f64,
    pub final_min_height: f64,
    pub final_max_height: f64,
    /// True when `Undecided` came from the stall detector.
    pub stalled: bool,
}

/// One explicit step (reference path, no caching). `run` uses an
/// internally cached loop that produces bit-identical states.
pub fn step(
    state: &mut FrontState,
    field: &ObstacleField,
    kin: &KineticRelation,
    force: f64,
    cfg: &SimConfig,
) -> Result<()> {
    let mut stepper = Stepper::new(state, field, kin, force, cfg)?;
    stepper.advance(state, field)?;
    Ok(())
}

/// Frame consumer for `run_frames`: receives `(step, t, heights)`.
pub type FrameSink<'a> = dyn FnMut(u64, f64, &[f64]) -> Result<()> + 'a;

/// Runs until classification; with `stride > 0` the sink receives a frame
/// at step 0 and every `stride`-th step, so a run deciding at step `m`
/// yields exactly `m / stride + 1` frames.
pub fn run(
    state: &mut FrontState,
    field: &mut ObstacleField,
    kin: &KineticRelation,
    force: f64,
    cfg: &SimConfig,
) -> Result<Outcome> {
    run_frames(state, field, kin, force, cfg, 0, &mut |_, _, _| Ok(()))
}

pub fn run_frames(
    state: &mut FrontState,
    field: &mut ObstacleField,
    kin: &KineticRelation,
    force: f64,
    cfg: &SimConfig,
    stride: u64,
    sink: &mut FrameSink,
) -> Result<Outcome> {
    state.validate()?;
    kin.validate()?;
    cfg.validate(state.dx, kin)?;
    if !force.is_finite() {
        return Err(Error::InvalidParam("force must be finite".into()));
    }

    let n = state.n() as f64;
    let strip = field.params().strip_height();
    let mut max_u = state.heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    field.extend_band(field.band_required(max_u) + 0.25 * strip)?;

    let mut stepper = Stepper::new(state, field, kin, force, cfg)?;
    let mut streak = 0u32;
    let mut steps = 0u64;
    // Checkpoints of (t, mean_u, min_u) for velocity and stall estimates.
    let ck_every = 512u64;
    let mut checkpoints: Vec<(f64, f64, f64)> = Vec::new();
    let t0_stats = stats_of(&state.heights);
    checkpoints.push((state.time, t0_stats.0, t0_stats.1));
    if stride > 0 {
        sink(0, state.time, &state.heights)?;
    }

    loop {
        // Keep the band ahead of the highest node before evaluating phi.
        if field.band_required(max_u) + 0.1 * strip > field.domain().y_max {
            field.extend_band(field.band_required(max_u) + strip)?;
        }
        let report = stepper.advance(state, field)?;
        steps += 1;
        state.time = stepper.t_start + steps as f64 * cfg.dt;
        max_u = report.max_u;

        if stride > 0 && steps.is_multiple_of(stride) {
            sink(steps, state.time, &state.heights)?;
        }

        if report.all_stuck {
            streak += 1;
        } else {
            streak = 0;
        }

        let decide = |tag: OutcomeTag, stalled: bool, state: &FrontState| Outcome {
            tag,
            t_decided: state.time,
            steps,
            mean_velocity: None,
            final_mean_height: report.sum_u / n,
            final_min_height: report.min_u,
            final_max_height: report.max_u,
            stalled,
        };

        if streak >= cfg.pinned_confirm_steps {
            return Ok(decide(OutcomeTag::Pinned, false, state));
        }
        if report.min_u >= cfg.h_ballistic {
            let mut out = decide(OutcomeTag::Ballistic, false, state);
            out.mean_velocity =
                Some(tail_velocity(&checkpoints, state.time, report.sum_u / n));
            return Ok(out);
        }
        if state.time >= cfg.t_max {
            return Ok(decide(OutcomeTag::Undecided, false, state));
        }

        if steps.is_multiple_of(ck_every) {
            let mean_u = report.sum_u / n;
            checkpoints.push((state.time, mean_u, report.min_u));
            if cfg.stall_check && checkpoints.len() >= 8 {
                let (t_now, _, min_now) = *checkpoints.last().unwrap();
                let idx_half = checkpoints.partition_point(|c| c.0 <= 0.5 * t_now);
                let (t_half, _, min_half) = checkpoints[idx_half.min(checkpoints.len() - 1)];
                let elapsed = t_now - t_half;
                let remaining = cfg.t_max - t_now;
                if elapsed > 0.0 && remaining > 0.0 {
                    let pace = (min_now - min_half) / elapsed;
                    let needed = (cfg.h_ballistic - min_now) / remaining;
                    if pace < 0.2 * needed {
                        return Ok(decide(OutcomeTag::Undecided, true, state));
                    }
                }
            }
        }
    }
}

fn stats_of(u: &[f64]) -> (f64, f64) {
    let sum: f64 = u.iter().sum();
    let min = u.iter().cloned().fold(f64::INFINITY, f64::min);
    (sum / u.len() as f64, min)
}

/// Mean vertical velocity over the trailing ~20% of the run, from stored
/// checkpoints of the mean height.
fn tail_velocity(checkpoints: &[(f64, f64, f64)], t_end: f64, mean_end: f64) -> f64 {
    let t_from = 0.8 * t_end;
    let idx = checkpoints.partition_point(|c| c.0 < t_from);
    let (t_k, mean_k, _) = checkpoints[idx.min(checkpoints.len() - 1)];
    if t_end > t_k {
        (mean_end - mean_k) / (t_end - t_k)
    } else {
        0.0
    }
}

struct StepReport {
    all_stuck: bool,
    sum_u: f64,
    min_u: f64,
    max_u: f64,
}

/// Cached explicit stepper. Edge values of `g(slope)` and the friction
/// threshold `tau + phi(x_i, u_i)` are reused verbatim for nodes whose
/// heights did not change, so stuck regions cost a few flops per node and
/// the computed floats are bit-identical to a full recomputation.
struct Stepper {
    force: f64,
    epsilon: f64,
    tau: f64,
    dt: f64,
    inv_dx: f64,
    half_inv_dx: f64,
    slope_max: f64,
    tol_v: f64,
    t_start: f64,
    g_edge: Vec<f64>,
    lambda: Vec<f64>,
    moved: Vec<bool>,
    next: Vec<f64>,
}

impl Stepper {
    fn new(
        state: &FrontState,
        field: &ObstacleField,
        kin: &KineticRelation,
        force: f64,
        cfg: &SimConfig,
    ) -> Result<Self> {
        state.validate()?;
        kin.validate()?;
        cfg.validate(state.dx, kin)?;
        let n = state.n();
        let mut s = Stepper {
            force,
            epsilon: kin.epsilon,
            tau: kin.tau,
            dt: cfg.dt,
            inv_dx: 1.0 / state.dx,
            half_inv_dx: 0.5 / state.dx,
            slope_max: cfg.slope_max,
            tol_v: cfg.tol_v,
            t_start: state.time,
            g_edge: vec![0.0; n],
            lambda: vec![0.0; n],
            moved: vec![true; n],
            next: vec![0.0; n],
        };
        // Prime caches with a full pass.
        for i in 0..n {
            s.refresh_edge(state, i)?;
            s.lambda[i] = s.tau + field.phi_hot(state.x_of(i), state.heights[i]);
        }
        Ok(s)
    }

    #[inline]
    fn refresh_edge(&mut self, state: &FrontState, i: usize) -> Result<()> {
        let n = state.heights.len();
        let j = if i + 1 == n { 0 } else { i + 1 };
        let slope = (state.heights[j] - state.heights[i]) * self.inv_dx;
        if slope.abs() > self.slope_max {
            return Err(Error::SlopeCap { node: i, slope: slope.abs(), cap: self.slope_max });
        }
        self.g_edge[i] = g_slope(slope);
        Ok(())
    }

    fn advance(&mut self, state: &mut FrontState, field: &ObstacleField) -> Result<StepReport> {
        let n = state.heights.len();
        // Refresh caches invalidated by the previous step.
        for i in 0..n {
            if self.moved[i] {
                self.lambda[i] = self.tau + field.phi_hot(state.x_of(i), state.heights[i]);
            }
        }
        for i in 0..n {
            let j = if i + 1 == n { 0 } else { i + 1 };
            if self.moved[i] || self.moved[j] {
                self.refresh_edge(state, i)?;
            }
        }

        let u = &state.heights;
        let mut all_stuck = true;
        let mut sum = 0.0;
        let mut min_u = f64::INFINITY;
        let mut max_u = f64::NEG_INFINITY;
        for i in 0..n {
            let prev_edge = if i == 0 { n - 1 } else { i - 1 };
            let kappa = (self.g_edge[i] - self.g_edge[prev_edge]) * self.inv_dx;
            let v = prox_dry_friction(kappa + self.force, self.lambda[i], self.epsilon);
            let ui = u[i];
            let new = if v == 0.0 {
                ui
            } else {
                let jp = if i + 1 == n { 0 } else { i + 1 };
                let jm = if i == 0 { n - 1 } else { i - 1 };
                let sc = (u[jp] - u[jm]) * self.half_inv_dx;
                ui + self.dt * v * (1.0 + sc * sc).sqrt()
            };
            if v.abs() > self.tol_v {
                all_stuck = false;
            }
            self.moved[i] = new.to_bits() != ui.to_bits();
            self.next[i] = new;
            sum += new;
            if new < min_u {
                min_u = new;
            }
            if new > max_u {
                max_u = new;
            }
        }
        if !sum.is_finite() {
            return Err(Error::NonFinite("front heights after step"));
        }
        std::mem::swap(&mut state.heights, &mut self.next);
        Ok(StepReport { all_stuck, sum_u: sum, min_u, max_u })
    }
}

/// Steps two ordered fronts in lockstep on the same field and force and
/// verifies the discrete comparison principle `u <= v` nodewise at every
/// step (exact). Returns the first violating (step, node) if any.
pub fn verify_monotone(
    lower0: &FrontState,
    upper0: &FrontState,
    field: &mut ObstacleField,
    kin: &KineticRelation,
    force: f64,
    cfg: &SimConfig,
    steps: u64,
) -> Result<Option<(u64, usize)>> {
    if lower0.n() != upper0.n() || lower0.dx != upper0.dx {
        return Err(Error::InvalidParam("fronts must share a grid".into()));
    }
    for i in 0..lower0.n() {
        if lower0.heights[i] > upper0.heights[i] {
            return Err(Error::InvalidParam(format!(
                "initial ordering violated at node {i}"
            )));
        }
    }
    let mut lo = lower0.clone();
    let mut hi = upper0.clone();
    let strip = field.params().strip_height();
    let top = hi.heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    field.extend_band(field.band_required(top) + 0.25 * strip)?;
    let mut s_lo = Stepper::new(&lo, field, kin, force, cfg)?;
    let mut s_hi = Stepper::new(&hi, field, kin, force, cfg)?;
    for step_idx in 1..=steps {
        let rep_lo = s_lo.advance(&mut lo, field)?;
        let rep_hi = s_hi.advance(&mut hi, field)?;
        for i in 0..lo.n() {
            if lo.heights[i] > hi.heights[i] {
                return Ok(Some((step_idx, i)));
            }
        }
        let top = rep_lo.max_u.max(rep_hi.max_u);
        if field.band_required(top) + 0.1 * strip > field.domain().y_max {
            field.extend_band(field.band_required(top) + strip)?;
        }
    }
    Ok(None)
}
