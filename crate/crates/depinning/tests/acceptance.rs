//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line with the measured numbers. Oracles live in
//! `common/mod.rs`; heavy fixtures (the 20-seed certificate batch) are
//! computed once and shared.

mod common;

use common::{exhaustive_min_selection, profile_quadrature, verdict};
use depinning::cert::{
    arc_connect, construct_path_evolution, find_free_path, find_lipschitz_selection,
    obstacle_cap, verify_supersolution, ArcSegment,
};
use depinning::config::{BisectionSettings, ExperimentConfig, ResolvedSim};
use depinning::critical::{certificate_sandwich, scaling_sweep, estimate_critical, SandwichReport};
use depinning::front::{
    prox_dry_friction, run_frames, step, FrontState, KineticRelation, OutcomeTag, SimConfig,
};
use depinning::obstacle::{ObstacleField, ObstacleParams};
use depinning::rng;
use rand::Rng;
use std::sync::OnceLock;

/// Density sweep at the reference obstacle parameters: five densities,
/// window 24 mean spacings wide, 12 seeds each, force tolerance 5e-3.
const SWEEP_JSON: &str = r#"{
  "obstacles": {"rho": 2.0, "f": 2.0, "r0": 0.1, "r1": 0.2},
  "kinetics": {"epsilon": 1.0, "tau": 0.0},
  "study": {"densities": [0.5, 1.0, 2.0, 4.0, 8.0], "n_seeds": 12, "width_factor": 24.0},
  "bisection": {"tol_f": 0.005},
  "seed": 1
}"#;

/// Same physics at one density with 20 seeds, for the certificate batch.
const CERT_BATCH_JSON: &str = r#"{
  "obstacles": {"rho": 2.0, "f": 2.0, "r0": 0.1, "r1": 0.2},
  "kinetics": {"epsilon": 1.0, "tau": 0.0},
  "study": {"densities": [2.0], "n_seeds": 20, "width_factor": 24.0},
  "bisection": {"tol_f": 0.005},
  "seed": 1
}"#;

fn cert_batch_cfg() -> ExperimentConfig {
    ExperimentConfig::from_json(CERT_BATCH_JSON).expect("batch config")
}

/// 20 lower-bound / estimate / upper-bound triples at density 2, built
/// once and shared by the soundness and ordering criteria.
fn cert_batch() -> &'static [SandwichReport] {
    static BATCH: OnceLock<Vec<SandwichReport>> = OnceLock::new();
    BATCH.get_or_init(|| {
        let cfg = cert_batch_cfg();
        (0..cfg.study.n_seeds)
            .map(|si| {
                let seed = rng::cell_seed(cfg.seed, 0, si as u64);
                certificate_sandwich(&cfg, 2.0, seed).expect("sandwich report")
            })
            .collect()
    })
}

#[test]
fn c01_critical_force_exponent_is_near_one_half() {
    let cfg = ExperimentConfig::from_json(SWEEP_JSON).expect("sweep config");
    let study = scaling_sweep(&cfg).expect("sweep");
    for p in &study.points {
        println!(
            "  rho {:>4}: mean gap {:.4} +- {:.4} ({} estimates, {} undecided probes{})",
            p.rho,
            p.mean_gap,
            p.stderr_gap,
            p.estimates.len(),
            p.undecided_total,
            if p.excluded { ", excluded" } else { "" }
        );
    }
    match study.fit {
        Some(fit) => verdict(
            1,
            "force-gap exponent",
            (0.35..=0.65).contains(&fit.slope),
            format!(
                "slope {:.4} (bootstrap 95% CI [{:.4}, {:.4}]) within [0.35, 0.65]",
                fit.slope, fit.slope_ci[0], fit.slope_ci[1]
            ),
        ),
        None => verdict(
            1,
            "force-gap exponent",
            false,
            format!("no fit: {}", study.fit_note.unwrap_or_default()),
        ),
    }
}

#[test]
fn c02_obstacle_free_threshold_equals_the_friction() {
    let params = ObstacleParams { rho: 1.0, r0: 0.1, r1: 0.2, f: 0.0, seed: 9 };
    let width = 8.0;
    let n = 64usize;
    let dx = width / n as f64;
    let mut field = ObstacleField::generate(params, width, -2.0, 12.0).expect("field");
    let kin = KineticRelation { epsilon: 1.0, tau: 0.4 };
    let sim = SimConfig::for_grid(dx, &kin, 1.0, 800.0);
    let res = ResolvedSim { width, dx, n, sim };
    let bis = BisectionSettings::default();
    let est = estimate_critical(&mut field, &kin, &res, &bis).expect("estimate");
    let tol = bis.tol_f.max(2.0 * sim.dt);
    verdict(
        2,
        "zero-pinning threshold",
        (est.f_crit - 0.4).abs() <= tol,
        format!("f_crit {:.6} vs friction 0.4, tolerance {:.3e}", est.f_crit, tol),
    );
}

#[test]
fn c03_ordered_fronts_never_cross() {
    let width = 8.0;
    let n = 128usize;
    let dx = width / n as f64;
    let steps = 10_000u32;
    let cases = 100u64;
    let tau_grid = [0.0, 0.2];
    let mut ordered_cases = 0u32;
    for case in 0..cases {
        let mut rg = rng::derived_rng(0xACCE_0003, case);
        let params = ObstacleParams {
            rho: 0.5 + 1.5 * rg.gen::<f64>(),
            r0: 0.1,
            r1: 0.2,
            f: 0.5 + 1.5 * rg.gen::<f64>(),
            seed: rg.gen(),
        };
        let field = ObstacleField::generate(params, width, -8.0, 24.0).expect("field");
        let kin = KineticRelation { epsilon: 1.0, tau: tau_grid[(case % 2) as usize] };
        let force = kin.tau + 1.2 * rg.gen::<f64>();
        let sim = SimConfig::for_grid(dx, &kin, 20.0, 1e9);

        let amp = 0.3 + 0.3 * rg.gen::<f64>();
        let k1 = 1.0 + (case % 3) as f64;
        let ph1 = std::f64::consts::TAU * rg.gen::<f64>();
        let ph2 = std::f64::consts::TAU * rg.gen::<f64>();
        // One case in five starts from identical fronts (the boundary of
        // the ordering).
        let off = if case % 5 == 0 { 0.0 } else { 0.05 + 0.35 * rg.gen::<f64>() };
        let mut lo = FrontState::flat(n, dx);
        let mut hi = FrontState::flat(n, dx);
        for i in 0..n {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            lo.heights[i] = amp * (k1 * t + ph1).sin();
            hi.heights[i] = lo.heights[i] + off * (1.0 + (2.0 * t + ph2).sin());
        }

        let mut ok = true;
        'run: for _ in 0..steps {
            step(&mut lo, &field, &kin, force, &sim).expect("step");
            step(&mut hi, &field, &kin, force, &sim).expect("step");
            for i in 0..n {
                if lo.heights[i] > hi.heights[i] {
                    ok = false;
                    break 'run;
                }
            }
        }
        if ok {
            ordered_cases += 1;
        }
    }
    verdict(
        3,
        "front ordering",
        ordered_cases == cases as u32,
        format!("{ordered_cases}/{cases} random ordered pairs stayed ordered for {steps} steps"),
    );
}

#[test]
fn c04_dry_friction_prox_laws_are_exact() {
    let trials = 100_000u64;
    let mut rg = rng::derived_rng(0xACCE_0004, 0);
    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..trials {
        let b = 6.0 * rg.gen::<f64>() - 3.0;
        let lambda = 2.0 * rg.gen::<f64>();
        let epsilon = 0.1 + 9.9 * rg.gen::<f64>();
        let v = prox_dry_friction(b, lambda, epsilon);
        let sticks = v == 0.0;
        if sticks != (b.abs() <= lambda) {
            ok = false;
            detail = format!("stick law broken at b={b}, lambda={lambda}");
            break;
        }
        if (epsilon * v).abs() > b.abs() {
            ok = false;
            detail = format!("contraction broken at b={b}, lambda={lambda}, epsilon={epsilon}");
            break;
        }
        let b2 = b + 3.0 * rg.gen::<f64>();
        if prox_dry_friction(b2, lambda, epsilon) < v {
            ok = false;
            detail = format!("monotonicity broken at b={b} vs {b2}");
            break;
        }
    }
    verdict(
        4,
        "prox laws",
        ok,
        if ok {
            format!("sticking iff |b| <= lambda, |eps v| <= |b|, monotone in b on {trials} triples")
        } else {
            detail
        },
    );
}

#[test]
fn c05_pinning_profile_matches_direct_quadrature() {
    let (r0, r1) = (0.1, 0.2);
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for &f in &[1.0, 2.0] {
        let params = ObstacleParams { rho: 1.0, r0, r1, f, seed: 0 };
        let field =
            ObstacleField::from_centers(params, 10.0, -1.0, 1.0, vec![[5.0, 0.0]]).expect("field");
        // Plateau and support are exact by construction.
        exact_ok &= field.phi(5.0 + 0.5 * r0, 0.0).unwrap() == f;
        exact_ok &= field.phi(5.0 + r0, 0.0).unwrap() == f;
        exact_ok &= field.phi(5.0 + r1, 0.0).unwrap() == 0.0;
        exact_ok &= field.phi(5.0 + 2.0 * r1, 0.0).unwrap() == 0.0;
        for k in 1..=32 {
            let d = r0 + (r1 - r0) * k as f64 / 33.0;
            let got = field.phi(5.0 + d, 0.0).unwrap();
            let want = f * profile_quadrature(r0, r1, d);
            worst = worst.max((got - want).abs());
        }
    }
    verdict(
        5,
        "pinning profile",
        exact_ok && worst <= 1e-6,
        format!("plateau/support exact, max quadrature deviation {worst:.3e} <= 1e-6"),
    );
}

/// Curvature of a graph segment at `x` by central differences with one
/// Richardson step, killing the leading `delta^2` truncation term.
fn numeric_curvature(seg: &ArcSegment, x: f64, delta: f64) -> f64 {
    let k = |h: f64| {
        let (um, u0, up) = (seg.eval(x - h), seg.eval(x), seg.eval(x + h));
        let d1 = (up - um) / (2.0 * h);
        let d2 = (up - 2.0 * u0 + um) / (h * h);
        d2 / (1.0 + d1 * d1).powf(1.5)
    };
    (4.0 * k(0.5 * delta) - k(delta)) / 3.0
}

#[test]
fn c06_arc_closed_forms_match_sampled_geometry() {
    let mut worst_endpoint = 0.0f64;
    let mut worst_curv = 0.0f64;
    let mut worst_slope = 0.0f64;
    let mut built = 0u32;

    for &xb in &[0.5, 1.0, 2.0] {
        for &yb in &[-0.2, 0.0, 0.15] {
            for &kappa in &[0.0, 0.2, 0.6] {
                let p1 = [0.3, -0.1];
                let p2 = [0.3 + xb, -0.1 + yb];
                let Some(seg) = arc_connect(p1, p2, kappa, 2.0).expect("arc_connect") else {
                    continue;
                };
                built += 1;
                worst_endpoint = worst_endpoint
                    .max((seg.eval(seg.x_lo()) - p1[1]).abs())
                    .max((seg.eval(seg.x_hi()) - p2[1]).abs());
                let span = seg.x_hi() - seg.x_lo();
                let delta = span / 512.0;
                for m in 0..=32 {
                    // Interior samples; the difference stencil needs room.
                    let x = seg.x_lo() + span * (0.1 + 0.8 * m as f64 / 32.0);
                    worst_curv = worst_curv
                        .max((numeric_curvature(&seg, x, delta) - seg.graph_curvature()).abs());
                }
            }
        }
    }

    for &r in &[0.05, 0.1, 0.2] {
        for &f_in in &[0.5, 1.0, 2.0, 4.0] {
            if f_in * r >= 0.999 {
                continue;
            }
            let cap = obstacle_cap([0.5, 1.0], r, f_in).expect("cap");
            built += 1;
            worst_endpoint = worst_endpoint
                .max((cap.eval(cap.x_lo()) - 1.0).abs())
                .max((cap.eval(cap.x_hi()) - 1.0).abs());
            let closed_form = r / (f_in.powi(-2) - r * r).sqrt();
            worst_slope = worst_slope
                .max((cap.slope(cap.x_hi()) - closed_form).abs())
                .max((cap.slope(cap.x_lo()) + closed_form).abs());
            let span = cap.x_hi() - cap.x_lo();
            let delta = span / 512.0;
            for m in 0..=32 {
                let x = cap.x_lo() + span * (0.1 + 0.8 * m as f64 / 32.0);
                worst_curv = worst_curv
                    .max((numeric_curvature(&cap, x, delta) - cap.graph_curvature()).abs());
            }
        }
    }

    verdict(
        6,
        "arc closed forms",
        built >= 20 && worst_endpoint <= 1e-12 && worst_slope <= 1e-12 && worst_curv <= 1e-6,
        format!(
            "{built} arcs: endpoint dev {worst_endpoint:.2e} <= 1e-12, \
             endpoint slope dev {worst_slope:.2e} <= 1e-12, sampled curvature dev {worst_curv:.2e} <= 1e-6"
        ),
    );
}

#[test]
fn c07_row_selection_matches_exhaustive_search() {
    let (n_cols, j_max) = (8usize, 6u32);
    let (l, d, h, r1) = (1.0, 0.5, 1.0, 0.2);
    let pitch = l + d;
    let width = n_cols as f64 * pitch;
    let mut agree = 0u32;
    let mut some_count = 0u32;
    let cases = 200u64;
    for case in 0..cases {
        let mut rg = rng::derived_rng(0xACCE_0007, case);
        let mut pattern = vec![false; n_cols * j_max as usize];
        for cell in pattern.iter_mut() {
            *cell = rg.gen::<f64>() < 0.55;
        }
        let occupied = |k: usize, j: u32| pattern[k * j_max as usize + (j - 1) as usize];

        let mut centers = Vec::new();
        for k in 0..n_cols {
            for j in 1..=j_max {
                if occupied(k, j) {
                    centers.push([k as f64 * pitch + 0.5 * l, j as f64 - 0.5 + r1]);
                }
            }
        }
        let params = ObstacleParams { rho: 1.0, r0: 0.1, r1, f: 1.0, seed: 0 };
        let field = ObstacleField::from_centers(params, width, -1.0, 8.0, centers).expect("field");

        let got = find_lipschitz_selection(&field, l, d, h, r1, j_max);
        let want = exhaustive_min_selection(n_cols, j_max, &occupied);
        if got == want {
            agree += 1;
        }
        if want.is_some() {
            some_count += 1;
        }
    }
    verdict(
        7,
        "minimal row selection",
        agree == cases as u32 && some_count > 20 && some_count < cases as u32 - 5,
        format!(
            "{agree}/{cases} random 8x6 grids agree with exhaustive search \
             ({some_count} feasible, {} infeasible)",
            cases as u32 - some_count
        ),
    );
}

#[test]
fn c08_lower_certificates_reverify_and_contain_the_dynamics() {
    let cfg = cert_batch_cfg();
    let res = cfg.resolve_sim(2.0).expect("resolve");
    let mut emitted = 0u32;
    let mut worst_residual = f64::INFINITY;
    let mut worst_exceed = f64::NEG_INFINITY;
    let mut all_pinned = true;

    for report in cert_batch() {
        let Some(lower) = &report.lower else { continue };
        emitted += 1;

        // Re-verify against a freshly generated copy of the realization.
        let mut field = ObstacleField::generate(
            cfg.obstacles.params(2.0, report.seed),
            res.width,
            -2.0,
            res.sim.h_ballistic + 1.0,
        )
        .expect("field");
        field.extend_band(lower.barrier.y_max() + 1.0).expect("band");
        let check =
            verify_supersolution(&lower.barrier, &field, &cfg.kinetics, lower.f_certified, &cfg.cert)
                .expect("verify");
        worst_residual = worst_residual.min(check.min_residual);
        assert!(check.pass, "re-verification failed for seed {}", report.seed);
        assert!(
            lower.barrier.y_min() > 0.0,
            "flat start must lie strictly below the barrier"
        );

        // Drive the front at exactly the certified force. Sticking is
        // never exact without friction, so rest is detected as a frozen
        // state: two snapshots 2000 steps apart that agree bitwise pin
        // the deterministic evolution forever.
        let mut sim = res.sim;
        sim.t_max = 250.0;
        sim.stall_check = false;
        let mut state = FrontState::flat(res.n, res.dx);
        let barrier = &lower.barrier;
        let dx = res.dx;
        let mut max_exceed = f64::NEG_INFINITY;
        let mut prev: Vec<f64> = Vec::new();
        let mut frozen = false;
        let outcome = run_frames(
            &mut state,
            &mut field,
            &cfg.kinetics,
            lower.f_certified,
            &sim,
            2000,
            &mut |_, _, u| {
                for (i, ui) in u.iter().enumerate() {
                    let gap = ui - barrier.eval(i as f64 * dx);
                    if gap > max_exceed {
                        max_exceed = gap;
                    }
                }
                frozen = !prev.is_empty() && prev == u;
                prev.clear();
                prev.extend_from_slice(u);
                Ok(())
            },
        )
        .expect("run");
        for (i, ui) in state.heights.iter().enumerate() {
            let gap = ui - barrier.eval(i as f64 * dx);
            if gap > max_exceed {
                max_exceed = gap;
            }
        }
        worst_exceed = worst_exceed.max(max_exceed);
        let pinned = outcome.tag == OutcomeTag::Pinned || (frozen && outcome.tag != OutcomeTag::Ballistic);
        if !pinned {
            all_pinned = false;
            println!(
                "  seed {}: outcome {:?}, frozen {frozen} at F = {}",
                report.seed, outcome.tag, lower.f_certified
            );
        }
    }

    verdict(
        8,
        "lower-bound soundness",
        emitted > 0 && worst_residual >= -1e-10 && worst_exceed <= res.dx && all_pinned,
        format!(
            "{emitted}/20 certificates emitted; min residual {worst_residual:.2e} >= -1e-10; \
             max barrier exceedance {worst_exceed:.3e} <= dx = {:.3e}; all runs came to rest",
            res.dx
        ),
    );
}

#[test]
fn c09_certificate_sandwich_orders_the_estimate() {
    let reports = cert_batch();
    let mut passes = 0u32;
    for r in reports {
        if r.complete && r.ordered == Some(true) {
            passes += 1;
        } else {
            println!(
                "  exception seed {}: f_lb {:?} f_hat {:?} f_ub {:?}; {}",
                r.seed,
                r.f_lb,
                r.f_hat,
                r.f_ub,
                if r.notes.is_empty() { "no diagnostics".to_string() } else { r.notes.join("; ") }
            );
        }
    }
    verdict(
        9,
        "certificate sandwich",
        passes * 10 >= reports.len() as u32 * 9,
        format!("lower <= estimate <= upper held on {passes}/{} seeds (need >= 90%)", reports.len()),
    );
}

#[test]
fn c10_escape_evolution_margins_are_nonnegative() {
    let params = ObstacleParams { rho: 1.0, r0: 0.1, r1: 0.2, f: 1.0, seed: 0 };
    let field = ObstacleField::from_centers(params, 6.0, -1.0, 8.0, Vec::new()).expect("field");
    let cert = depinning::config::CertSettings::default();
    let path = find_free_path(&field, 1.0, 0.0, &cert)
        .expect("search")
        .expect("empty field must have a corridor");
    assert_eq!(path.h, 1.0);
    let kin = KineticRelation { epsilon: 1.0, tau: 0.0 };
    let evo = construct_path_evolution(&path, 2.1, 0.1, &kin).expect("evolution");
    let kappa_dev = (evo.kappa_peak * path.h / 2.0 - 1.0).abs();
    verdict(
        10,
        "escape evolution",
        evo.pass && evo.min_margin >= 0.0 && kappa_dev <= 1e-12 && evo.phases.len() == 3,
        format!(
            "min margin {:.3e} >= 0 over {} phases; peak curvature dev {kappa_dev:.2e} <= 1e-12",
            evo.min_margin,
            evo.phases.len()
        ),
    );
}

#[test]
fn c11_sweep_bytes_are_worker_count_invariant() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{
  "obstacles": {"rho": 1.0, "f": 2.0, "r0": 0.1, "r1": 0.2},
  "study": {"densities": [1.0, 4.0], "n_seeds": 2, "width_factor": 6.0},
  "sim": {"dx": 0.1},
  "bisection": {"tol_f": 0.02},
  "seed": 3
}"#,
    )
    .expect("write config");

    let run = |out: &str, workers: &str| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_depinning"))
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(dir.path().join(out))
            .arg("--workers")
            .arg(workers)
            .arg("scaling")
            .status()
            .expect("spawn");
        assert!(status.success(), "scaling run failed");
    };
    run("w1", "1");
    run("w3", "3");

    let mut same = true;
    let mut detail = Vec::new();
    for name in ["scaling.csv", "study.json"] {
        let a = std::fs::read(dir.path().join("w1").join(name)).expect("read");
        let b = std::fs::read(dir.path().join("w3").join(name)).expect("read");
        same &= a == b;
        detail.push(format!("{name}: {} bytes {}", a.len(), if a == b { "equal" } else { "DIFFER" }));
    }
    verdict(11, "worker-count determinism", same, detail.join(", "));
}
