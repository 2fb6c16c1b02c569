//! Experiment configuration: a single JSON schema with defaults for every
//! key, strict validation (unknown keys rejected, messages name the keys),
//! and a stable content hash that is embedded in every output artifact.
//!
//! The hash covers everything that changes results; it excludes `out_dir`
//! and `workers`, which only affect where and how fast artifacts are
//! produced, never their bytes.

use crate::error::{Error, Result};
use crate::front::{KineticRelation, SimConfig};
use crate::obstacle::ObstacleParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

/// Obstacle-field parameters without a seed (seeds are assigned per cell).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ObstacleConfig {
    /// Poisson intensity (obstacles per unit area).
    pub rho: f64,
    /// Inner radius: full pinning strength inside.
    pub r0: f64,
    /// Outer radius: zero pinning strength beyond.
    pub r1: f64,
    /// Pinning strength on the plateau.
    pub f: f64,
}

impl Default for ObstacleConfig {
    fn default() -> Self {
        ObstacleConfig { rho: 1.0, r0: 0.1, r1: 0.2, f: 2.0 }
    }
}

impl ObstacleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "obstacles.rho must be > 0, got {}",
                self.rho
            )));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "obstacles.r0 must be > 0, got {}",
                self.r0
            )));
        }
        if !(self.r1 > self.r0) {
            return Err(Error::InvalidParam(format!(
                "obstacles.r1 ({}) must exceed obstacles.r0 ({})",
                self.r1, self.r0
            )));
        }
        if !(self.f >= 0.0 && self.f.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "obstacles.f must be >= 0, got {}",
                self.f
            )));
        }
        Ok(())
    }

    /// Runtime obstacle parameters at a given density and seed.
    pub fn params(&self, rho: f64, seed: u64) -> ObstacleParams {
        ObstacleParams { rho, r0: self.r0, r1: self.r1, f: self.f, seed }
    }
}

/// Time-stepping knobs. `None` means "derive from the density":
/// `dx = min(r0/4, 0.05/sqrt(rho))` (at least 8 nodes across an obstacle),
/// `dt = cfl * epsilon * dx^2`, `h_ballistic = 4/sqrt(rho)` (several
/// obstacle spacings), `t_max = 200 * epsilon / rho` (keeps the undecided
/// force bias near 0.02 * sqrt(rho), uniform in the density).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SimSettings {
    pub cfl: f64,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub h_ballistic: Option<f64>,
    pub pinned_confirm_steps: u32,
    pub tol_v: f64,
    pub slope_max: f64,
    pub stall_check: bool,
    pub snapshot_stride: u64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            cfl: 0.2,
            dx: None,
            dt: None,
            t_max: None,
            h_ballistic: None,
            pinned_confirm_steps: 20,
            tol_v: 0.0,
            slope_max: 10.0,
            stall_check: true,
            snapshot_stride: 0,
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.25) {
            return Err(Error::InvalidParam(format!(
                "sim.cfl must lie in (0, 0.25], got {}",
                self.cfl
            )));
        }
        for (key, v) in [
            ("sim.dx", self.dx),
            ("sim.dt", self.dt),
            ("sim.t_max", self.t_max),
            ("sim.h_ballistic", self.h_ballistic),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParam(format!("{key} must be > 0, got {v}")));
                }
            }
        }
        if self.pinned_confirm_steps == 0 {
            return Err(Error::InvalidParam(
                "sim.pinned_confirm_steps must be >= 1".into(),
            ));
        }
        if !(self.tol_v >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "sim.tol_v must be >= 0, got {}",
                self.tol_v
            )));
        }
        if !(self.slope_max > 0.0) {
            return Err(Error::InvalidParam(format!(
                "sim.slope_max must be > 0, got {}",
                self.slope_max
            )));
        }
        Ok(())
    }
}

/// Bisection knobs. `f_lo` defaults to `tau` (a flat front sticks there);
/// `f_hi` defaults to `tau + f + 2/h_ballistic`; the upper edge doubles its
/// gap above `tau` until ballistic, capped at `tau + f_cap`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BisectionSettings {
    pub f_lo: Option<f64>,
    pub f_hi: Option<f64>,
    pub tol_f: f64,
    pub max_iter: u32,
    pub f_cap: f64,
}

impl Default for BisectionSettings {
    fn default() -> Self {
        BisectionSettings { f_lo: None, f_hi: None, tol_f: 5e-3, max_iter: 64, f_cap: 64.0 }
    }
}

impl BisectionSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_f > 0.0 && self.tol_f.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "bisection.tol_f must be > 0, got {}",
                self.tol_f
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParam("bisection.max_iter must be >= 1".into()));
        }
        if !(self.f_cap > 0.0 && self.f_cap.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "bisection.f_cap must be > 0, got {}",
                self.f_cap
            )));
        }
        if let (Some(lo), Some(hi)) = (self.f_lo, self.f_hi) {
            if !(lo < hi) {
                return Err(Error::InvalidParam(format!(
                    "bisection.f_lo ({lo}) must be below bisection.f_hi ({hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Density sweep: window width is `width_factor / sqrt(rho)` so each
/// window holds about `width_factor^2` obstacles regardless of density.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct StudySettings {
    pub densities: Vec<f64>,
    pub n_seeds: u32,
    pub width_factor: f64,
    pub bootstrap: u32,
}

impl Default for StudySettings {
    fn default() -> Self {
        StudySettings {
            densities: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            n_seeds: 12,
            width_factor: 24.0,
            bootstrap: 1000,
        }
    }
}

impl StudySettings {
    pub fn validate(&self) -> Result<()> {
        if self.densities.is_empty() {
            return Err(Error::InvalidParam("study.densities must be non-empty".into()));
        }
        for w in self.densities.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParam(
                    "study.densities must be strictly increasing".into(),
                ));
            }
        }
        if !(self.densities[0] > 0.0) || !self.densities.iter().all(|d| d.is_finite()) {
            return Err(Error::InvalidParam(
                "study.densities must be positive and finite".into(),
            ));
        }
        if self.n_seeds == 0 {
            return Err(Error::InvalidParam("study.n_seeds must be >= 1".into()));
        }
        if !(self.width_factor > 0.0 && self.width_factor.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "study.width_factor must be > 0, got {}",
                self.width_factor
            )));
        }
        Ok(())
    }
}

/// Certificate knobs. `p_c` only enters the analytic-bound report (the
/// constructed certificates are per-realization geometric facts); `j_max`
/// caps the barrier row index; `samples_per_segment` sets the verification
/// sampling density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CertSettings {
    pub p_c: f64,
    pub j_max: u32,
    pub samples_per_segment: u32,
}

impl Default for CertSettings {
    fn default() -> Self {
        CertSettings { p_c: 0.9375, j_max: 32, samples_per_segment: 64 }
    }
}

impl CertSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_c > 0.0 && self.p_c < 1.0) {
            return Err(Error::InvalidParam(format!(
                "cert.p_c must lie in (0, 1), got {}",
                self.p_c
            )));
        }
        if self.j_max == 0 {
            return Err(Error::InvalidParam("cert.j_max must be >= 1".into()));
        }
        if self.samples_per_segment < 16 {
            return Err(Error::InvalidParam(format!(
                "cert.samples_per_segment must be >= 16, got {}",
                self.samples_per_segment
            )));
        }
        Ok(())
    }
}

/// The complete experiment description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub obstacles: ObstacleConfig,
    pub kinetics: KineticRelation,
    pub sim: SimSettings,
    pub bisection: BisectionSettings,
    pub study: StudySettings,
    pub cert: CertSettings,
    /// Master seed; every cell derives its own stream from it.
    pub seed: u64,
    /// Output directory (not part of the config hash).
    pub out_dir: String,
    /// Worker threads; 0 means all available (not part of the config hash).
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            obstacles: ObstacleConfig::default(),
            kinetics: KineticRelation::default(),
            sim: SimSettings::default(),
            bisection: BisectionSettings::default(),
            study: StudySettings::default(),
            cert: CertSettings::default(),
            seed: 1,
            out_dir: "out".into(),
            workers: 0,
        }
    }
}

/// Grid and stepping resolved for one density.
#[derive(Debug, Clone, Copy)]
pub struct ResolvedSim {
    pub width: f64,
    pub dx: f64,
    pub n: usize,
    pub sim: SimConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.obstacles.validate()?;
        self.kinetics.validate()?;
        self.sim.validate()?;
        self.bisection.validate()?;
        self.study.validate()?;
        self.cert.validate()?;
        Ok(())
    }

    /// Grid spacing, window width, and stepping for one density.
    pub fn resolve_sim(&self, rho: f64) -> Result<ResolvedSim> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParam(format!("rho must be > 0, got {rho}")));
        }
        let width = self.study.width_factor / rho.sqrt();
        let dx_target = self
            .sim
            .dx
            .unwrap_or_else(|| (self.obstacles.r0 / 4.0).min(0.05 / rho.sqrt()));
        let n = ((width / dx_target).ceil() as usize).max(8);
        let dx = width / n as f64;
        let eps = self.kinetics.epsilon;
        let dt = self.sim.dt.unwrap_or(self.sim.cfl * eps * dx * dx);
        if dt > 0.25 * eps * dx * dx * (1.0 + 1e-12) {
            return Err(Error::InvalidParam(format!(
                "sim.dt ({dt}) violates dt <= 0.25 * epsilon * dx^2 = {}",
                0.25 * eps * dx * dx
            )));
        }
        let h_ballistic = self.sim.h_ballistic.unwrap_or(4.0 / rho.sqrt());
        let t_max = self.sim.t_max.unwrap_or(200.0 * eps / rho);
        Ok(ResolvedSim {
            width,
            dx,
            n,
            sim: SimConfig {
                dt,
                t_max,
                h_ballistic,
                pinned_confirm_steps: self.sim.pinned_confirm_steps,
                tol_v: self.sim.tol_v,
                slope_max: self.sim.slope_max,
                stall_check: self.sim.stall_check,
            },
        })
    }

    /// 12-hex-digit hash of the result-determining keys, stable under key
    /// reordering in the source file (hashes the canonical serialization,
    /// not the input text). `out_dir` and `workers` are excluded.
    pub fn config_hash(&self) -> String {
        #[derive(Serialize)]
        struct HashView<'a> {
            obstacles: &'a ObstacleConfig,
            kinetics: &'a KineticRelation,
            sim: &'a SimSettings,
            bisection: &'a BisectionSettings,
            study: &'a StudySettings,
            cert: &'a CertSettings,
        }
        let view = HashView {
            obstacles: &self.obstacles,
            kinetics: &self.kinetics,
            sim: &self.sim,
            bisection: &self.bisection,
            study: &self.study,
            cert: &self.cert,
        };
        let canonical = serde_json::to_string(&view).expect("config serialization");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(12);
        for byte in digest.iter().take(6) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// Applied command-line overrides, recorded verbatim in output artifacts.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Overrides(pub BTreeMap<String, String>);

impl Overrides {
    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
