//! Command-line front end: reproducible experiments over quenched
//! obstacle fields, certificate construction, and report emission.
//!
//! Exit codes: 0 success, 2 invalid input (bad flags or config), 3
//! runtime failure (numerical abort, bracketing failure, I/O).

use clap::{Args, Parser, Subcommand};
use depinning::cert::{construct_path_evolution, find_best_path, find_free_path};
use depinning::config::{ExperimentConfig, Overrides};
use depinning::critical::{best_lower_cert, certificate_sandwich, estimate_critical, scaling_sweep};
use depinning::error::{Error, Result};
use depinning::front::{run_frames, FrontState};
use depinning::obstacle::ObstacleField;
use depinning::report::{emit_report, fmt_f64, write_csv, write_json, Provenance};
use depinning::{critical, rng};
use serde_json::json;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "depinning",
    version,
    about = "Front depinning in random obstacle fields: simulation, critical-force estimation, and verified pinning/propagation certificates"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Globals {
    /// Experiment config file (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config value).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Obstacle density (overrides obstacles.rho).
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Output directory (overrides out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = all cores (overrides workers).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Simulated-time wall (overrides sim.t_max).
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
    /// Bisection force tolerance (overrides bisection.tol_f).
    #[arg(long = "tol-f", global = true)]
    tol_f: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate one obstacle field and write it as JSON lines.
    FieldGen(FieldGenArgs),
    /// Evolve a front at a fixed force; record frames and the outcome.
    Simulate(SimulateArgs),
    /// Bisect the pinned/ballistic transition on one realization.
    Critical,
    /// Sweep densities and seeds, fit the critical-gap exponent.
    Scaling,
    /// Build and verify a pinning barrier (certified lower bound).
    CertifyLower,
    /// Find a free corridor (certified upper bound).
    CertifyUpper(CertifyUpperArgs),
    /// Run lower bound, estimate, and upper bound per seed; check order.
    Sandwich,
    /// Summarize a finished scaling study: JSON summary + plot columns.
    Report(ReportArgs),
}

#[derive(Args)]
struct FieldGenArgs {
    /// Top of the generated band; default covers the escape height.
    #[arg(long)]
    y_top: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Driving force F (total, including any kinetic offset).
    #[arg(long)]
    force: f64,
    /// Record every STRIDE-th step to frames.csv (0 = outcome only).
    #[arg(long)]
    stride: Option<u64>,
    /// Load the field from a JSON-lines file instead of generating it.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyUpperArgs {
    /// Fixed cube side; when omitted a ladder searches downward for the
    /// widest corridor.
    #[arg(long)]
    h: Option<f64>,
    /// Optional driving force; when admissible, an explicit escape
    /// evolution is attached to the certificate.
    #[arg(long)]
    force: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Study artifact produced by `scaling` (default: OUT/study.json).
    #[arg(long)]
    study: Option<PathBuf>,
    /// Sandwich artifact produced by `sandwich` (default:
    /// OUT/sandwich.json when present).
    #[arg(long)]
    sandwich: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_validation() { 2 } else { 3 });
    }
}

/// Loads the config, applies flag overrides, and records them.
fn load_config(globals: &Globals) -> Result<(ExperimentConfig, Overrides)> {
    let mut cfg = match &globals.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let mut ov = Overrides::default();
    if let Some(seed) = globals.seed {
        cfg.seed = seed;
        ov.record("seed", seed);
    }
    if let Some(rho) = globals.rho {
        cfg.obstacles.rho = rho;
        ov.record("rho", rho);
    }
    // `out` and `workers` steer execution, not results; like the config
    // hash, the provenance override record excludes them so reruns with a
    // different output directory or thread count stay byte-identical.
    if let Some(out) = &globals.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(workers) = globals.workers {
        cfg.workers = workers;
    }
    if let Some(t_max) = globals.t_max {
        cfg.sim.t_max = Some(t_max);
        ov.record("t_max", t_max);
    }
    if let Some(tol_f) = globals.tol_f {
        cfg.bisection.tol_f = tol_f;
        ov.record("tol_f", tol_f);
    }
    cfg.validate()?;
    Ok((cfg, ov))
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Generates the quenched field for the active density and master seed.
fn make_field(cfg: &ExperimentConfig, y_top: Option<f64>) -> Result<(ObstacleField, f64)> {
    let rho = cfg.obstacles.rho;
    let res = cfg.resolve_sim(rho)?;
    let top = y_top.unwrap_or(res.sim.h_ballistic + 1.0);
    let field =
        ObstacleField::generate(cfg.obstacles.params(rho, cfg.seed), res.width, -2.0, top)?;
    Ok((field, rho))
}

/// Two-line JSON-lines certificate artifact: a self-describing header,
/// then the payload record.
fn write_cert_jsonl<T: serde::Serialize>(
    path: &Path,
    kind: &str,
    prov: &Provenance,
    rho: f64,
    payload: &T,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let header = json!({
        "kind": kind,
        "version": prov.version,
        "config_hash": prov.config_hash,
        "seed": prov.seed,
        "rho": rho,
    });
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    serde_json::to_writer(&mut out, payload)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (cfg, ov) = load_config(&cli.globals)?;
    let prov = Provenance::new(cfg.config_hash(), cfg.seed, ov);
    let dir = out_dir(&cfg)?;

    match cli.cmd {
        Cmd::FieldGen(args) => {
            let (field, rho) = make_field(&cfg, args.y_top)?;
            let path = dir.join("field.jsonl");
            field.dump_tagged(BufWriter::new(File::create(&path)?), Some(&prov.config_hash))?;
            println!(
                "wrote {} ({} centers, rho={}, width={})",
                path.display(),
                field.centers().len(),
                rho,
                fmt_f64(field.domain().width)
            );
        }
        Cmd::Simulate(args) => cmd_simulate(&cfg, &prov, &dir, &args)?,
        Cmd::Critical => {
            let rho = cfg.obstacles.rho;
            let res = cfg.resolve_sim(rho)?;
            let (mut field, _) = make_field(&cfg, None)?;
            let est = estimate_critical(&mut field, &cfg.kinetics, &res, &cfg.bisection)?;
            let path = dir.join("critical.json");
            write_json(&path, &prov, "estimate", &est)?;
            println!(
                "f_crit = {} (bracket [{}, {}], {} probes) -> {}",
                fmt_f64(est.f_crit),
                fmt_f64(est.bracket_lo),
                fmt_f64(est.bracket_hi),
                est.probes.len(),
                path.display()
            );
        }
        Cmd::Scaling => cmd_scaling(&cfg, &prov, &dir)?,
        Cmd::CertifyLower => {
            let rho = cfg.obstacles.rho;
            let (mut field, _) = make_field(&cfg, None)?;
            let cert = best_lower_cert(&mut field, &cfg)?;
            let path = dir.join("lower.jsonl");
            write_cert_jsonl(&path, "lower_certificate", &prov, rho, &json!({ "certificate": cert }))?;
            match &cert {
                Some(c) => println!(
                    "certified F_crit >= {} (verified residual {:.3e}) -> {}",
                    fmt_f64(c.f_certified),
                    c.verify.min_residual,
                    path.display()
                ),
                None => println!("no barrier certificate for this realization -> {}", path.display()),
            }
        }
        Cmd::CertifyUpper(args) => cmd_certify_upper(&cfg, &prov, &dir, &args)?,
        Cmd::Sandwich => cmd_sandwich(&cfg, &prov, &dir)?,
        Cmd::Report(args) => cmd_report(&cfg, &prov, &dir, &args)?,
    }
    Ok(())
}

fn cmd_simulate(
    cfg: &ExperimentConfig,
    prov: &Provenance,
    dir: &Path,
    args: &SimulateArgs,
) -> Result<()> {
    let rho = cfg.obstacles.rho;
    let res = cfg.resolve_sim(rho)?;
    let mut field = match &args.field {
        Some(path) => ObstacleField::load(BufReader::new(File::open(path)?))?,
        None => make_field(cfg, None)?.0,
    };
    let n = if args.field.is_some() {
        // A loaded field fixes the window; keep the configured resolution.
        ((field.domain().width / res.dx).round() as usize).max(8)
    } else {
        res.n
    };
    let dx = field.domain().width / n as f64;
    let mut sim = res.sim;
    if args.field.is_some() {
        sim.dt = sim.dt.min(0.25 * cfg.kinetics.epsilon * dx * dx);
    }
    let stride = args.stride.unwrap_or(cfg.sim.snapshot_stride);

    let frames_path = dir.join("frames.csv");
    let mut state = FrontState::flat(n, dx);
    let outcome;
    if stride > 0 {
        let mut file = BufWriter::new(File::create(&frames_path)?);
        writeln!(file, "{}", prov.comment_line())?;
        let mut w = csv::Writer::from_writer(file);
        let mut header = vec!["step".to_string(), "t".to_string()];
        header.extend((0..n).map(|i| format!("u_{i}")));
        w.write_record(&header)?;
        let mut rows = 0u64;
        outcome = run_frames(
            &mut state,
            &mut field,
            &cfg.kinetics,
            args.force,
            &sim,
            stride,
            &mut |step, t, u| {
                let mut row = Vec::with_capacity(n + 2);
                row.push(step.to_string());
                row.push(fmt_f64(t));
                row.extend(u.iter().map(|v| fmt_f64(*v)));
                w.write_record(&row)?;
                rows += 1;
                Ok(())
            },
        )?;
        w.flush()?;
        println!("wrote {} ({rows} frames)", frames_path.display());
    } else {
        outcome = run_frames(
            &mut state,
            &mut field,
            &cfg.kinetics,
            args.force,
            &sim,
            0,
            &mut |_, _, _| Ok(()),
        )?;
    }

    let outcome_path = dir.join("outcome.json");
    let doc = json!({
        "rho": rho,
        "force": args.force,
        "n": n,
        "dx": dx,
        "dt": sim.dt,
        "stride": stride,
        "outcome": outcome,
    });
    write_json(&outcome_path, prov, "run", &doc)?;
    println!(
        "{:?} at t = {} after {} steps -> {}",
        outcome.tag,
        fmt_f64(outcome.t_decided),
        outcome.steps,
        outcome_path.display()
    );
    Ok(())
}

fn cmd_scaling(cfg: &ExperimentConfig, prov: &Provenance, dir: &Path) -> Result<()> {
    let study = scaling_sweep(cfg)?;

    let mut rows = Vec::new();
    for point in &study.points {
        for est in &point.estimates {
            rows.push(vec![
                fmt_f64(est.rho),
                est.seed.to_string(),
                fmt_f64(est.f_crit),
                fmt_f64(est.bracket_lo),
                fmt_f64(est.bracket_hi),
                est.undecided_probes.to_string(),
            ]);
        }
    }
    let csv_path = dir.join("scaling.csv");
    write_csv(
        &csv_path,
        prov,
        &["rho", "seed", "f_crit", "bracket_lo", "bracket_hi", "undecided_probes"],
        rows,
    )?;
    let study_path = dir.join("study.json");
    write_json(&study_path, prov, "study", &study)?;

    match &study.fit {
        Some(fit) => println!(
            "slope = {:.4} (95% CI [{:.4}, {:.4}]) over {} densities -> {}",
            fit.slope,
            fit.slope_ci[0],
            fit.slope_ci[1],
            study.points.iter().filter(|p| !p.excluded).count(),
            study_path.display()
        ),
        None => println!(
            "no fit: {} -> {}",
            study.fit_note.as_deref().unwrap_or("unknown"),
            study_path.display()
        ),
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn cmd_certify_upper(
    cfg: &ExperimentConfig,
    prov: &Provenance,
    dir: &Path,
    args: &CertifyUpperArgs,
) -> Result<()> {
    let rho = cfg.obstacles.rho;
    let res = cfg.resolve_sim(rho)?;
    let tau = cfg.kinetics.tau;
    let y_top = 1.5 * res.sim.h_ballistic;
    let (mut field, _) = make_field(cfg, Some(y_top + 1.0))?;
    let cert = match args.h {
        Some(h) => {
            field.extend_band(field.band_required(y_top))?;
            find_free_path(&field, h, tau, &cfg.cert)?
        }
        None => {
            let h_max = 0.25 * field.domain().width;
            find_best_path(&mut field, h_max, y_top, tau, &cfg.cert)?
        }
    };
    let evolution = match (&cert, args.force) {
        (Some(path), Some(force)) => {
            let budget = force - tau - 2.0 / path.h;
            if budget > 0.0 {
                let v0 = 0.5 * budget / cfg.kinetics.epsilon;
                Some(construct_path_evolution(path, force, v0, &cfg.kinetics)?)
            } else {
                println!(
                    "force {} is below the corridor bound {}; no evolution attached",
                    fmt_f64(force),
                    fmt_f64(tau + 2.0 / path.h)
                );
                None
            }
        }
        _ => None,
    };
    let path = dir.join("upper.jsonl");
    write_cert_jsonl(
        &path,
        "upper_certificate",
        prov,
        rho,
        &json!({ "certificate": cert, "evolution": evolution }),
    )?;
    match &cert {
        Some(c) => println!(
            "certified F_crit <= {} (cube side {}) -> {}",
            fmt_f64(c.f_ub),
            fmt_f64(c.h),
            path.display()
        ),
        None => println!("no free corridor found -> {}", path.display()),
    }
    Ok(())
}

fn cmd_sandwich(cfg: &ExperimentConfig, prov: &Provenance, dir: &Path) -> Result<()> {
    let rho = cfg.obstacles.rho;
    let mut reports = Vec::new();
    for si in 0..cfg.study.n_seeds {
        let seed = rng::cell_seed(cfg.seed, 0, si as u64);
        reports.push(certificate_sandwich(cfg, rho, seed)?);
    }
    let rows = reports
        .iter()
        .map(|r| {
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            vec![
                fmt_f64(r.rho),
                r.seed.to_string(),
                opt(r.f_lb),
                opt(r.f_hat),
                opt(r.f_ub),
                r.ordered.map(|b| b.to_string()).unwrap_or_default(),
                r.complete.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    let csv_path = dir.join("sandwich.csv");
    write_csv(
        &csv_path,
        prov,
        &["rho", "seed", "f_lb", "f_hat", "f_ub", "ordered", "complete"],
        rows,
    )?;
    let passes = reports.iter().filter(|r| r.complete && r.ordered == Some(true)).count();
    let json_path = dir.join("sandwich.json");
    write_json(
        &json_path,
        prov,
        "sandwich",
        &json!({
            "rho": rho,
            "attempts": reports.len(),
            "passes": passes,
            "reports": reports,
        }),
    )?;
    println!(
        "sandwich held on {passes}/{} seeds at rho = {} -> {}",
        reports.len(),
        fmt_f64(rho),
        json_path.display()
    );
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn cmd_report(cfg: &ExperimentConfig, prov: &Provenance, dir: &Path, args: &ReportArgs) -> Result<()> {
    let study_path = args.study.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_dir).join("study.json"));
    let doc: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(&study_path)?))?;
    let study: critical::ScalingStudy = serde_json::from_value(
        doc.get("study")
            .cloned()
            .ok_or_else(|| Error::Config(format!("{} has no study record", study_path.display())))?,
    )?;

    let sandwich_path = args
        .sandwich
        .clone()
        .or_else(|| {
            let p = PathBuf::from(&cfg.out_dir).join("sandwich.json");
            p.exists().then_some(p)
        });
    let sandwiches: Vec<critical::SandwichReport> = match sandwich_path {
        Some(p) => {
            let doc: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(&p)?))?;
            serde_json::from_value(
                doc.pointer("/sandwich/reports")
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("{} has no sandwich reports", p.display())))?,
            )?
        }
        None => Vec::new(),
    };

    // The report inherits identity from the study it summarizes.
    let prov = Provenance::new(study.config_hash.clone(), study.master_seed, prov.overrides.clone());
    let paths = emit_report(&study, &sandwiches, dir, &prov)?;
    println!("wrote {} and {}", paths.summary.display(), paths.plot.display());
    Ok(())
}
