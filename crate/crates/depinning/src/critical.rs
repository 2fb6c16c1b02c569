//! Critical-force estimation and the density-scaling study.
//!
//! The probe at a given force runs the front from a flat start on the
//! quenched realization and classifies the outcome; bisection on the
//! force squeezes the pinned/ballistic transition. An `Undecided` outcome
//! counts as not-ballistic: misreading a slow ballistic run as pinned
//! inflates the estimate in a way the probe log exposes, while the
//! opposite error would silently deflate it. The sweep runs one bisection
//! per (density, seed) cell, fits `log(mean gap)` against `log rho`, and
//! bootstraps a confidence interval over seeds.

use crate::cert::barrier::{build_barrier, max_certifiable_gap, LowerCert};
use crate::cert::path::{find_best_path, PathCert};
use crate::config::{BisectionSettings, ExperimentConfig, ResolvedSim};
use crate::error::{Error, Result};
use crate::front::{self, FrontState, KineticRelation, OutcomeTag};
use crate::obstacle::ObstacleField;
use crate::rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One force probe from the bisection log.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ProbeRecord {
    pub force: f64,
    pub outcome: OutcomeTag,
    pub t_decided: f64,
    pub mean_velocity: Option<f64>,
    pub stalled: bool,
}

/// Bisection result for one realization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CriticalEstimate {
    pub rho: f64,
    pub seed: u64,
    pub tau: f64,
    /// Midpoint of the final bracket.
    pub f_crit: f64,
    /// Highest force that did not run ballistic.
    pub bracket_lo: f64,
    /// Lowest force that ran ballistic.
    pub bracket_hi: f64,
    /// Whether the bracket closed below `tol_f`.
    pub converged: bool,
    /// Probes that hit `t_max` (or stalled) without classifying.
    pub undecided_probes: usize,
    pub probes: Vec<ProbeRecord>,
}

impl CriticalEstimate {
    pub fn gap(&self) -> f64 {
        self.f_crit - self.tau
    }

    /// Re-asserts the bracket from the stored log: the lower edge was
    /// probed and did not run ballistic, the upper edge was probed and
    /// did.
    pub fn bracket_consistent(&self) -> bool {
        let lo_ok = self
            .probes
            .iter()
            .any(|p| p.force == self.bracket_lo && p.outcome != OutcomeTag::Ballistic);
        let hi_ok = self
            .probes
            .iter()
            .any(|p| p.force == self.bracket_hi && p.outcome == OutcomeTag::Ballistic);
        lo_ok && hi_ok && self.bracket_lo < self.bracket_hi
    }
}

fn probe_once(
    field: &mut ObstacleField,
    kin: &KineticRelation,
    res: &ResolvedSim,
    force: f64,
    probes: &mut Vec<ProbeRecord>,
    undecided: &mut usize,
) -> Result<OutcomeTag> {
    let mut state = FrontState::flat(res.n, res.dx);
    let out = front::run(&mut state, field, kin, force, &res.sim)?;
    if out.tag == OutcomeTag::Undecided {
        *undecided += 1;
    }
    probes.push(ProbeRecord {
        force,
        outcome: out.tag,
        t_decided: out.t_decided,
        mean_velocity: out.mean_velocity,
        stalled: out.stalled,
    });
    Ok(out.tag)
}

/// Brackets and bisects the pinned/ballistic transition on one quenched
/// realization. Every probe restarts from the same flat front; the field
/// band only ever grows, which never changes already-generated obstacles.
pub fn estimate_critical(
    field: &mut ObstacleField,
    kin: &KineticRelation,
    res: &ResolvedSim,
    bis: &BisectionSettings,
) -> Result<CriticalEstimate> {
    kin.validate()?;
    bis.validate()?;
    let tau = kin.tau;
    let mut lo = bis.f_lo.unwrap_or(tau);
    let mut hi = bis
        .f_hi
        .unwrap_or(tau + field.params().f + 2.0 / res.sim.h_ballistic);
    if !(lo < hi) {
        return Err(Error::InvalidParam(format!(
            "bisection needs f_lo < f_hi, got [{lo}, {hi}]"
        )));
    }

    let mut probes = Vec::new();
    let mut undecided = 0usize;
    if probe_once(field, kin, res, lo, &mut probes, &mut undecided)? == OutcomeTag::Ballistic {
        return Err(Error::Bracket(format!("lower edge F = {lo} already runs ballistic")));
    }
    loop {
        match probe_once(field, kin, res, hi, &mut probes, &mut undecided)? {
            OutcomeTag::Ballistic => break,
            _ => {
                lo = hi;
                // Doubling above tau; a user guess below tau restarts the
                // growth from the tolerance scale.
                let gap = (hi - tau).max(bis.tol_f);
                hi = tau + 2.0 * gap;
                if hi - tau > bis.f_cap {
                    return Err(Error::Bracket(format!(
                        "no ballistic outcome up to tau + {} (every probe pinned or undecided)",
                        bis.f_cap
                    )));
                }
            }
        }
    }
    let mut iters = 0;
    while hi - lo > bis.tol_f && iters < bis.max_iter {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break; // bracket at floating-point resolution
        }
        match probe_once(field, kin, res, mid, &mut probes, &mut undecided)? {
            OutcomeTag::Ballistic => hi = mid,
            _ => lo = mid,
        }
        iters += 1;
    }
    if undecided == probes.len() {
        return Err(Error::Bracket(
            "every probe was undecided; raise sim.t_max or stall thresholds".into(),
        ));
    }
    Ok(CriticalEstimate {
        rho: field.params().rho,
        seed: field.params().seed,
        tau,
        f_crit: 0.5 * (lo + hi),
        bracket_lo: lo,
        bracket_hi: hi,
        converged: hi - lo <= bis.tol_f,
        undecided_probes: undecided,
        probes,
    })
}

/// Aggregated estimates at one density.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DensityPoint {
    pub rho: f64,
    pub estimates: Vec<CriticalEstimate>,
    /// Per-failed-seed error messages (bracketing failures and the like).
    pub failures: Vec<String>,
    pub mean_gap: f64,
    pub stderr_gap: f64,
    pub undecided_total: usize,
    /// More than half the seeds failed: dropped from the fit.
    pub excluded: bool,
}

/// Power-law fit of the gap against density, with a bootstrap interval.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci: [f64; 2],
    pub bootstrap_samples: u32,
}

/// Full sweep output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalingStudy {
    pub tau: f64,
    pub master_seed: u64,
    pub config_hash: String,
    pub points: Vec<DensityPoint>,
    pub fit: Option<FitResult>,
    /// Why no fit was emitted, when it was not.
    pub fit_note: Option<String>,
    pub notes: Vec<String>,
}

/// Least-squares slope and intercept of `ln(gap)` against `ln(rho)`.
///
/// The slope is computed from the log-ratios `ln(gap_i / gap_0)`, which
/// are invariant when every gap is scaled by a power of two (the scaling
/// cancels exactly in the quotient), so slope bits cannot move under such
/// a rescaling; the intercept absorbs the scale.
pub fn fit_gaps(rhos: &[f64], gaps: &[f64]) -> Result<(f64, f64)> {
    if rhos.len() != gaps.len() || rhos.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "fit needs >= 2 matched points, got {} and {}",
            rhos.len(),
            gaps.len()
        )));
    }
    if gaps.iter().any(|&g| !(g > 0.0)) || rhos.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParam("fit needs positive densities and gaps".into()));
    }
    let n = rhos.len() as f64;
    let xs: Vec<f64> = rhos.iter().map(|r| r.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, &g) in xs.iter().zip(gaps) {
        let y = (g / gaps[0]).ln();
        num += (x - x_mean) * y;
        den += (x - x_mean) * (x - x_mean);
    }
    if den == 0.0 {
        return Err(Error::InvalidParam("fit needs at least two distinct densities".into()));
    }
    let slope = num / den;
    let y_mean = gaps.iter().map(|g| g.ln()).sum::<f64>() / n;
    Ok((slope, y_mean - slope * x_mean))
}

/// Runs one bisection per (density, seed) cell in parallel and fits the
/// scaling of the mean gap. Cell seeds derive from the master seed and
/// the cell coordinates alone, and results are merged in cell order, so
/// the study is identical for any worker count.
pub fn scaling_sweep(cfg: &ExperimentConfig) -> Result<ScalingStudy> {
    cfg.validate()?;
    let densities = &cfg.study.densities;
    let n_seeds = cfg.study.n_seeds;
    let mut notes = Vec::new();
    if let Some(&rho_max) = densities.last() {
        let spacing = 1.0 / rho_max.sqrt();
        if cfg.obstacles.r1 > 0.5 * spacing {
            notes.push(format!(
                "obstacle support r1 = {} is not small against the spacing {spacing:.4} at rho = {rho_max}; overlaps are frequent",
                cfg.obstacles.r1
            ));
        }
    }

    let cells: Vec<(usize, u64)> = (0..densities.len())
        .flat_map(|ri| (0..n_seeds as u64).map(move |si| (ri, si)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParam(format!("worker pool: {e}")))?;
    // Indexed parallel map preserves input order in the collected vector,
    // so the merge below is schedule-independent.
    let results: Vec<Result<CriticalEstimate>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(ri, si)| {
                let rho = densities[ri];
                let seed = rng::cell_seed(cfg.seed, ri as u64, si);
                let res = cfg.resolve_sim(rho)?;
                let mut field = ObstacleField::generate(
                    cfg.obstacles.params(rho, seed),
                    res.width,
                    -2.0,
                    res.sim.h_ballistic + 1.0,
                )?;
                estimate_critical(&mut field, &cfg.kinetics, &res, &cfg.bisection)
            })
            .collect()
    });

    let mut points = Vec::with_capacity(densities.len());
    for (ri, &rho) in densities.iter().enumerate() {
        let mut estimates = Vec::new();
        let mut failures = Vec::new();
        for si in 0..n_seeds {
            match &results[ri * n_seeds as usize + si as usize] {
                Ok(est) => estimates.push(est.clone()),
                Err(Error::Bracket(msg)) => failures.push(msg.clone()),
                Err(other) => return Err(Error::InvalidParam(other.to_string())),
            }
        }
        let gaps: Vec<f64> = estimates.iter().map(|e| e.gap()).collect();
        let n = gaps.len() as f64;
        let mean_gap = if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<f64>() / n };
        let stderr_gap = if gaps.len() < 2 {
            0.0
        } else {
            let var = gaps.iter().map(|g| (g - mean_gap) * (g - mean_gap)).sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        };
        points.push(DensityPoint {
            rho,
            undecided_total: estimates.iter().map(|e| e.undecided_probes).sum(),
            excluded: failures.len() * 2 > n_seeds as usize,
            estimates,
            failures,
            mean_gap,
            stderr_gap,
        });
    }

    let included: Vec<&DensityPoint> =
        points.iter().filter(|p| !p.excluded && p.estimates.len() >= 8).collect();
    let (fit, fit_note) = if included.len() < 4 {
        (
            None,
            Some(format!(
                "fit needs >= 4 densities with >= 8 estimates each; {} qualify",
                included.len()
            )),
        )
    } else if included.iter().any(|p| !(p.mean_gap > 0.0)) {
        (None, Some("fit needs positive mean gaps at every density".into()))
    } else {
        let rhos: Vec<f64> = included.iter().map(|p| p.rho).collect();
        let gaps: Vec<f64> = included.iter().map(|p| p.mean_gap).collect();
        let (slope, intercept) = fit_gaps(&rhos, &gaps)?;
        let slope_ci = bootstrap_slope_ci(&included, cfg.seed, cfg.study.bootstrap)
            .unwrap_or([slope, slope]);
        (
            Some(FitResult {
                slope,
                intercept,
                slope_ci,
                bootstrap_samples: cfg.study.bootstrap,
            }),
            None,
        )
    };
    Ok(ScalingStudy {
        tau: cfg.kinetics.tau,
        master_seed: cfg.seed,
        config_hash: cfg.config_hash(),
        points,
        fit,
        fit_note,
        notes,
    })
}

/// Percentile bootstrap over seeds within each density: resample the
/// per-seed gaps, refit, take the 2.5% and 97.5% quantiles of the slope.
/// A single sequential stream keeps the interval reproducible.
fn bootstrap_slope_ci(points: &[&DensityPoint], master_seed: u64, b: u32) -> Option<[f64; 2]> {
    if b < 8 {
        return None;
    }
    let gap_lists: Vec<Vec<f64>> =
        points.iter().map(|p| p.estimates.iter().map(|e| e.gap()).collect()).collect();
    let rhos: Vec<f64> = points.iter().map(|p| p.rho).collect();
    let mut rng = rng::derived_rng(master_seed, 0xb0075);
    let mut slopes = Vec::with_capacity(b as usize);
    for _ in 0..b {
        let means: Vec<f64> = gap_lists
            .iter()
            .map(|gaps| {
                let m = gaps.len();
                (0..m).map(|_| gaps[rng.gen_range(0..m)]).sum::<f64>() / m as f64
            })
            .collect();
        if let Ok((slope, _)) = fit_gaps(&rhos, &means) {
            slopes.push(slope);
        }
    }
    if slopes.len() < 8 {
        return None;
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |frac: f64| slopes[((slopes.len() - 1) as f64 * frac).round() as usize];
    Some([q(0.025), q(0.975)])
}

/// Lower bound, midpoint estimate, and upper bound on one realization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SandwichReport {
    pub rho: f64,
    pub seed: u64,
    pub tau: f64,
    pub f_lb: Option<f64>,
    pub f_hat: Option<f64>,
    pub f_ub: Option<f64>,
    /// All pairwise orderings among the present values hold (1e-9 slack);
    /// absent until at least two sides exist.
    pub ordered: Option<bool>,
    /// All three sides present.
    pub complete: bool,
    pub notes: Vec<String>,
    pub lower: Option<LowerCert>,
    pub upper: Option<PathCert>,
    pub estimate: Option<CriticalEstimate>,
}

/// Finds the largest certifiable lower bound by bisecting barrier
/// feasibility over the force.
pub fn best_lower_cert(
    field: &mut ObstacleField,
    cfg: &ExperimentConfig,
) -> Result<Option<LowerCert>> {
    let tau = cfg.kinetics.tau;
    let cap = max_certifiable_gap(field.params());
    if cap <= 0.0 {
        return Ok(None);
    }
    // Feasibility is monotone in the force: assembly does not depend on
    // it, and the residual slack shrinks linearly. Probe the cap first.
    if let Some(cert) = build_barrier(field, &cfg.kinetics, tau + cap, &cfg.cert)? {
        return Ok(Some(cert));
    }
    let mut best = match build_barrier(field, &cfg.kinetics, tau, &cfg.cert)? {
        Some(cert) => cert,
        None => return Ok(None),
    };
    let (mut lo, mut hi) = (0.0, cap);
    while hi - lo > cfg.bisection.tol_f {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break;
        }
        match build_barrier(field, &cfg.kinetics, tau + mid, &cfg.cert)? {
            Some(cert) => {
                best = cert;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Ok(Some(best))
}

/// Attempts all three sides on one realization: barrier lower bound,
/// bisection estimate, corridor upper bound. Missing sides degrade the
/// report to one-sided instead of failing it.
pub fn certificate_sandwich(
    cfg: &ExperimentConfig,
    rho: f64,
    seed: u64,
) -> Result<SandwichReport> {
    cfg.validate()?;
    let res = cfg.resolve_sim(rho)?;
    let mut field = ObstacleField::generate(
        cfg.obstacles.params(rho, seed),
        res.width,
        -2.0,
        res.sim.h_ballistic + 1.0,
    )?;
    let tau = cfg.kinetics.tau;
    let mut notes = Vec::new();

    let lower = best_lower_cert(&mut field, cfg)?;
    if lower.is_none() {
        notes.push(format!(
            "no barrier in width {:.3}: selection or arc assembly infeasible for this realization",
            res.width
        ));
    }

    let estimate = match estimate_critical(&mut field, &cfg.kinetics, &res, &cfg.bisection) {
        Ok(est) => Some(est),
        Err(Error::Bracket(msg)) => {
            notes.push(format!("bisection failed: {msg}"));
            None
        }
        Err(other) => return Err(other),
    };

    let upper = find_best_path(
        &mut field,
        res.width / 4.0,
        1.5 * res.sim.h_ballistic,
        tau,
        &cfg.cert,
    )?;
    if upper.is_none() {
        notes.push("no free corridor at any ladder rung".into());
    }

    let f_lb = lower.as_ref().map(|c| c.f_certified);
    let f_hat = estimate.as_ref().map(|e| e.f_crit);
    let f_ub = upper.as_ref().map(|p| p.f_ub);
    let present: Vec<f64> = [f_lb, f_hat, f_ub].iter().flatten().cloned().collect();
    let ordered = if present.len() >= 2 {
        Some(present.windows(2).all(|w| w[0] <= w[1] + 1e-9))
    } else {
        None
    };
    Ok(SandwichReport {
        rho,
        seed,
        tau,
        f_lb,
        f_hat,
        f_ub,
        ordered,
        complete: lower.is_some() && estimate.is_some() && upper.is_some(),
        notes,
        lower,
        upper,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimSettings;
    use crate::obstacle::ObstacleParams;

    fn flat_resolved(n: usize, width: f64, h_ballistic: f64, t_max: f64) -> ResolvedSim {
        let dx = width / n as f64;
        let kin = KineticRelation { epsilon: 1.0, tau: 0.0 };
        let mut sim = crate::front::SimConfig::for_grid(dx, &kin, h_ballistic, t_max);
        sim.stall_check = true;
        ResolvedSim { width, dx, n, sim }
    }

    fn empty_field(width: f64, seed: u64) -> ObstacleField {
        let p = ObstacleParams { rho: 1.0, r0: 0.1, r1: 0.2, f: 2.0, seed };
        ObstacleField::from_centers(p, width, -2.0, 4.0, vec![]).unwrap()
    }

    #[test]
    fn obstacle_free_threshold_equals_tau() {
        let kin = KineticRelation { epsilon: 1.0, tau: 0.4 };
        let res = flat_resolved(16, 4.0, 1.0, 800.0);
        let bis = BisectionSettings { tol_f: 5e-3, ..Default::default() };
        let mut field = empty_field(4.0, 11);
        let est = estimate_critical(&mut field, &kin, &res, &bis).unwrap();
        let tol = (2.0 * res.sim.dt).max(bis.tol_f);
        assert!(
            (est.f_crit - 0.4).abs() <= tol,
            "f_crit = {} not within {tol} of tau",
            est.f_crit
        );
        assert!(est.converged);
        assert!(est.bracket_consistent());
        assert!(est.bracket_hi - est.bracket_lo <= bis.tol_f);
    }

    #[test]
    fn friction_shifts_the_threshold_additively() {
        // Same realization, two friction levels: the threshold moves by
        // exactly the friction difference up to bisection resolution.
        let res = flat_resolved(64, 8.0, 1.5, 200.0);
        let bis = BisectionSettings { tol_f: 5e-3, ..Default::default() };
        let p = ObstacleParams { rho: 0.5, r0: 0.1, r1: 0.2, f: 1.0, seed: 21 };
        let mut field = ObstacleField::generate(p, 8.0, -2.0, 3.0).unwrap();
        let kin1 = KineticRelation { epsilon: 1.0, tau: 0.1 };
        let kin2 = KineticRelation { epsilon: 1.0, tau: 0.35 };
        let e1 = estimate_critical(&mut field, &kin1, &res, &bis).unwrap();
        let e2 = estimate_critical(&mut field, &kin2, &res, &bis).unwrap();
        assert!(
            ((e2.f_crit - e1.f_crit) - 0.25).abs() <= 0.02,
            "shift = {}",
            e2.f_crit - e1.f_crit
        );
    }

    #[test]
    fn bracket_edges_reproduce_their_outcomes() {
        let kin = KineticRelation { epsilon: 1.0, tau: 0.2 };
        let res = flat_resolved(48, 6.0, 1.0, 150.0);
        let bis = BisectionSettings { tol_f: 1e-2, ..Default::default() };
        let p = ObstacleParams { rho: 1.0, r0: 0.1, r1: 0.2, f: 1.0, seed: 33 };
        let mut field = ObstacleField::generate(p, 6.0, -2.0, 2.5).unwrap();
        let est = estimate_critical(&mut field, &kin, &res, &bis).unwrap();
        assert!(est.bracket_consistent());
        // Re-execution at the stored edges, fresh flat starts.
        let mut probes = Vec::new();
        let mut und = 0;
        let lo_tag =
            probe_once(&mut field, &kin, &res, est.bracket_lo, &mut probes, &mut und).unwrap();
        let hi_tag =
            probe_once(&mut field, &kin, &res, est.bracket_hi, &mut probes, &mut und).unwrap();
        assert_ne!(lo_tag, OutcomeTag::Ballistic);
        assert_eq!(hi_tag, OutcomeTag::Ballistic);
    }

    #[test]
    fn bracketing_failure_is_a_typed_error() {
        // Every force below tau sticks exactly, and the doubling cap sits
        // below tau, so no ballistic probe can ever occur.
        let kin = KineticRelation { epsilon: 1.0, tau: 0.5 };
        let res = flat_resolved(16, 4.0, 1.0, 50.0);
        let bis = BisectionSettings {
            f_lo: Some(0.0),
            f_hi: Some(0.1),
            tol_f: 1e-2,
            max_iter: 16,
            f_cap: 5e-3,
        };
        let mut field = empty_field(4.0, 5);
        match estimate_critical(&mut field, &kin, &res, &bis) {
            Err(Error::Bracket(_)) => {}
            other => panic!("expected bracketing error, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_power_law_fits_exactly() {
        let rhos: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
        let gaps: Vec<f64> = rhos.iter().map(|r| 0.7 * r.sqrt()).collect();
        let (slope, intercept) = fit_gaps(&rhos, &gaps).unwrap();
        assert!((slope - 0.5).abs() <= 1e-12, "slope = {slope}");
        assert!((intercept - 0.7f64.ln()).abs() <= 1e-9);
        // Scaling every gap by a power of two moves the intercept only;
        // the slope does not change in a single bit.
        let scaled: Vec<f64> = gaps.iter().map(|g| 4.0 * g).collect();
        let (slope2, intercept2) = fit_gaps(&rhos, &scaled).unwrap();
        assert_eq!(slope.to_bits(), slope2.to_bits());
        assert!((intercept2 - intercept - 4.0f64.ln()).abs() <= 1e-9);
    }

    #[test]
    fn single_density_study_records_estimates_without_a_fit() {
        let mut cfg = ExperimentConfig::default();
        cfg.obstacles.f = 0.0;
        cfg.kinetics.tau = 0.3;
        cfg.study.densities = vec![1.0];
        cfg.study.n_seeds = 2;
        cfg.study.width_factor = 4.0;
        cfg.sim = SimSettings {
            dx: Some(0.25),
            t_max: Some(50.0),
            h_ballistic: Some(1.0),
            ..Default::default()
        };
        cfg.bisection.tol_f = 1e-2;
        cfg.workers = 1;
        let study = scaling_sweep(&cfg).unwrap();
        assert!(study.fit.is_none());
        assert!(study.fit_note.is_some());
        assert_eq!(study.points.len(), 1);
        assert_eq!(study.points[0].estimates.len(), 2);
        assert!((study.points[0].mean_gap).abs() <= 2e-2);
    }

    #[test]
    fn sweep_is_identical_for_any_worker_count() {
        let mut cfg = ExperimentConfig::default();
        cfg.obstacles.f = 0.5;
        cfg.kinetics.tau = 0.1;
        cfg.study.densities = vec![0.5, 1.0];
        cfg.study.n_seeds = 3;
        cfg.study.width_factor = 4.0;
        cfg.sim = SimSettings {
            dx: Some(0.2),
            t_max: Some(60.0),
            h_ballistic: Some(1.0),
            ..Default::default()
        };
        cfg.bisection.tol_f = 1e-2;
        cfg.workers = 1;
        let a = scaling_sweep(&cfg).unwrap();
        cfg.workers = 3;
        let b = scaling_sweep(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn obstacle_free_sandwich_is_one_sided() {
        let mut cfg = ExperimentConfig::default();
        cfg.obstacles.f = 0.0;
        cfg.kinetics.tau = 0.2;
        cfg.study.width_factor = 6.0;
        cfg.sim = SimSettings {
            dx: Some(0.25),
            t_max: Some(100.0),
            h_ballistic: Some(1.0),
            ..Default::default()
        };
        cfg.bisection.tol_f = 1e-2;
        let report = certificate_sandwich(&cfg, 1.0, 77).unwrap();
        assert!(report.f_lb.is_none(), "no barrier can exist without obstacles");
        let f_hat = report.f_hat.expect("estimate must succeed");
        assert!((f_hat - 0.2).abs() <= 0.03);
        let f_ub = report.f_ub.expect("straight corridor must exist");
        assert_eq!(f_ub, 0.2 + 2.0 / report.upper.as_ref().unwrap().h);
        assert_eq!(report.ordered, Some(true));
        assert!(!report.complete);
    }
}
