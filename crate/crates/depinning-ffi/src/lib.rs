//! C ABI for the depinning toolkit. Fields are opaque handles created and
//! destroyed here; every call returns a status code and leaves a message
//! for the last failure in thread-local storage. No pointer returned by
//! this library may be freed by the caller except through `depin_field_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use depinning::cert::find_free_path;
use depinning::config::{BisectionSettings, ExperimentConfig, ResolvedSim};
use depinning::critical::{best_lower_cert, estimate_critical};
use depinning::front::{run, FrontState, KineticRelation, OutcomeTag, SimConfig};
use depinning::obstacle::{ObstacleField, ObstacleParams};

/// Result of any API call. Anything but `Ok` leaves a human-readable
/// message readable through `depin_last_error`.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepinStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Arguments failed validation (ranges, grid shape, geometry).
    InvalidParam = 2,
    /// The computation itself failed (e.g. a front left the stored band).
    RuntimeError = 3,
    /// A panic was caught at the boundary; state may be inconsistent.
    InternalPanic = 4,
}

/// Opaque random obstacle field. Thread-confined: do not share one handle
/// across threads without external synchronization.
pub struct DepinField {
    inner: ObstacleField,
}

/// Outcome of a single relaxation run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DepinOutcome {
    /// 0 = pinned, 1 = ballistic, 2 = undecided at the time horizon.
    pub tag: i32,
    /// Simulated time at which the classification fired.
    pub t_decided: f64,
    /// Explicit Euler steps taken.
    pub steps: u64,
    /// Mean vertical velocity near the end (NaN unless ballistic).
    pub mean_velocity: f64,
    /// Mean front height when the run stopped.
    pub final_mean_height: f64,
}

/// Bisection estimate of the critical driving force.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DepinCritical {
    /// Midpoint of the final bracket.
    pub f_crit: f64,
    /// Highest force that did not run ballistic.
    pub bracket_lo: f64,
    /// Lowest force that ran ballistic.
    pub bracket_hi: f64,
    /// 1 when the bracket closed below the requested tolerance.
    pub converged: i32,
    /// Probes that hit the time horizon without classifying.
    pub undecided_probes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_err(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn fail(e: &depinning::Error) -> DepinStatus {
    set_err(&e.to_string());
    if e.is_validation() {
        DepinStatus::InvalidParam
    } else {
        DepinStatus::RuntimeError
    }
}

/// Runs `f` with a panic net so unwinding never crosses the C boundary.
fn guarded<F: FnOnce() -> DepinStatus>(f: F) -> DepinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_err("internal panic; the handle involved should be freed");
            DepinStatus::InternalPanic
        }
    }
}

macro_rules! require {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_err(concat!(stringify!($ptr), " must not be null"));
            return DepinStatus::NullArgument;
        }
    };
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn depin_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(depinning::VERSION).unwrap()).as_ptr()
}

/// Message describing this thread's most recent failure (empty string if
/// none). Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn depin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Samples a Poisson obstacle field on the periodic strip
/// `[0, width) x [y_min, y_max]`. `rho` is the areal density, `f` the
/// pinning strength, `r0 < r1` the plateau and support radii of one
/// obstacle. On success `*out` owns the field; release it with
/// `depin_field_free`.
///
/// # Safety
///
/// `out` must be a valid location to store one pointer.
#[no_mangle]
pub unsafe extern "C" fn depin_field_generate(
    rho: f64,
    f: f64,
    r0: f64,
    r1: f64,
    seed: u64,
    width: f64,
    y_min: f64,
    y_max: f64,
    out: *mut *mut DepinField,
) -> DepinStatus {
    require!(out);
    guarded(|| {
        let params = ObstacleParams { rho, r0, r1, f, seed };
        match ObstacleField::generate(params, width, y_min, y_max) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DepinField { inner }));
                DepinStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a field handle. Passing null is a no-op; passing the same
/// handle twice is undefined behavior.
///
/// # Safety
///
/// `field` must be null or a handle from `depin_field_generate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn depin_field_free(field: *mut DepinField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Domain width of the field (the x-period).
///
/// # Safety
///
/// `field` must be a live handle; `out` must be valid for one double.
#[no_mangle]
pub unsafe extern "C" fn depin_field_width(field: *const DepinField, out: *mut f64) -> DepinStatus {
    require!(field);
    require!(out);
    guarded(|| {
        *out = (*field).inner.domain().width;
        DepinStatus::Ok
    })
}

/// Grows the stored obstacle band so heights up to `y_max` can be probed.
/// Extension replays the same per-strip random streams, so values already
/// observed do not change.
///
/// # Safety
///
/// `field` must be a live handle with no concurrent use.
#[no_mangle]
pub unsafe extern "C" fn depin_field_extend(field: *mut DepinField, y_max: f64) -> DepinStatus {
    require!(field);
    guarded(|| match (*field).inner.extend_band(y_max) {
        Ok(()) => DepinStatus::Ok,
        Err(e) => fail(&e),
    })
}

/// Total pinning strength at `(x, y)`; `x` is reduced modulo the width,
/// `y` must lie inside the stored band (extend first if needed).
///
/// # Safety
///
/// `field` must be a live handle; `out` must be valid for one double.
#[no_mangle]
pub unsafe extern "C" fn depin_field_phi(
    field: *const DepinField,
    x: f64,
    y: f64,
    out: *mut f64,
) -> DepinStatus {
    require!(field);
    require!(out);
    guarded(|| match (*field).inner.phi(x, y) {
        Ok(v) => {
            *out = v;
            DepinStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

fn grid_for(field: &ObstacleField, dx: f64) -> Result<(usize, f64), DepinStatus> {
    let width = field.domain().width;
    if !(dx > 0.0 && dx.is_finite() && dx < width) {
        set_err("dx must be positive and smaller than the field width");
        return Err(DepinStatus::InvalidParam);
    }
    let n = (width / dx).round().max(8.0) as usize;
    Ok((n, width / n as f64))
}

/// Relaxes a flat front driven by `force` under the kinetics
/// `epsilon v + tau sign(v)`, on a grid of spacing ~`dx`, until it is
/// classified as pinned, ballistic (mean height beyond `h_ballistic`), or
/// the horizon `t_max` expires. The band is grown on demand.
///
/// # Safety
///
/// `field` must be a live handle with no concurrent use; `out` must be valid for one `DepinOutcome`.
#[no_mangle]
pub unsafe extern "C" fn depin_simulate(
    field: *mut DepinField,
    epsilon: f64,
    tau: f64,
    force: f64,
    dx: f64,
    t_max: f64,
    h_ballistic: f64,
    out: *mut DepinOutcome,
) -> DepinStatus {
    require!(field);
    require!(out);
    guarded(|| {
        let field = &mut (*field).inner;
        let (n, dx) = match grid_for(field, dx) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let kin = KineticRelation { epsilon, tau };
        if let Err(e) = kin.validate() {
            return fail(&e);
        }
        let sim = SimConfig::for_grid(dx, &kin, h_ballistic, t_max);
        let mut state = FrontState::flat(n, dx);
        match run(&mut state, field, &kin, force, &sim) {
            Ok(o) => {
                *out = DepinOutcome {
                    tag: match o.tag {
                        OutcomeTag::Pinned => 0,
                        OutcomeTag::Ballistic => 1,
                        OutcomeTag::Undecided => 2,
                    },
                    t_decided: o.t_decided,
                    steps: o.steps,
                    mean_velocity: o.mean_velocity.unwrap_or(f64::NAN),
                    final_mean_height: o.final_mean_height,
                };
                DepinStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Brackets and bisects the critical force for this realization down to
/// `tol_f`. Kinetics, grid, horizon, and escape height are as in
/// `depin_simulate`.
///
/// # Safety
///
/// `field` must be a live handle with no concurrent use; `out` must be valid for one `DepinCritical`.
#[no_mangle]
pub unsafe extern "C" fn depin_critical_force(
    field: *mut DepinField,
    epsilon: f64,
    tau: f64,
    dx: f64,
    t_max: f64,
    h_ballistic: f64,
    tol_f: f64,
    out: *mut DepinCritical,
) -> DepinStatus {
    require!(field);
    require!(out);
    guarded(|| {
        let field = &mut (*field).inner;
        let (n, dx) = match grid_for(field, dx) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let kin = KineticRelation { epsilon, tau };
        let res = ResolvedSim {
            width: field.domain().width,
            dx,
            n,
            sim: SimConfig::for_grid(dx, &kin, h_ballistic, t_max),
        };
        let bis = BisectionSettings { tol_f, ..BisectionSettings::default() };
        match estimate_critical(field, &kin, &res, &bis) {
            Ok(est) => {
                *out = DepinCritical {
                    f_crit: est.f_crit,
                    bracket_lo: est.bracket_lo,
                    bracket_hi: est.bracket_hi,
                    converged: est.converged as i32,
                    undecided_probes: est.undecided_probes as u64,
                };
                DepinStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Searches for the strongest pinning lower bound provable by a
/// stationary barrier in this realization. On success `*found` says
/// whether a certificate exists; if so `*f_certified` is the force up to
/// which the field provably pins a flat front under friction `tau`.
///
/// # Safety
///
/// `field` must be a live handle with no concurrent use; `f_certified` and `found` must be valid destinations.
#[no_mangle]
pub unsafe extern "C" fn depin_lower_certificate(
    field: *mut DepinField,
    tau: f64,
    tol_f: f64,
    f_certified: *mut f64,
    found: *mut bool,
) -> DepinStatus {
    require!(field);
    require!(f_certified);
    require!(found);
    guarded(|| {
        let mut cfg = ExperimentConfig::default();
        cfg.kinetics.tau = tau;
        cfg.bisection.tol_f = tol_f;
        if let Err(e) = cfg.kinetics.validate() {
            return fail(&e);
        }
        if let Err(e) = cfg.bisection.validate() {
            return fail(&e);
        }
        match best_lower_cert(&mut (*field).inner, &cfg) {
            Ok(Some(cert)) => {
                *f_certified = cert.f_certified;
                *found = true;
                DepinStatus::Ok
            }
            Ok(None) => {
                *f_certified = f64::NAN;
                *found = false;
                DepinStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Searches for an open corridor of obstacle-free cubes of side `h`
/// crossing the band. On success `*found` says whether one exists; if so
/// `*f_ub` is the certified upper bound `tau + 2/h` on the critical
/// force.
///
/// # Safety
///
/// `field` must be a live handle; `f_ub` and `found` must be valid destinations.
#[no_mangle]
pub unsafe extern "C" fn depin_upper_certificate(
    field: *const DepinField,
    h: f64,
    tau: f64,
    f_ub: *mut f64,
    found: *mut bool,
) -> DepinStatus {
    require!(field);
    require!(f_ub);
    require!(found);
    guarded(|| {
        let cert = ExperimentConfig::default().cert;
        match find_free_path(&(*field).inner, h, tau, &cert) {
            Ok(Some(path)) => {
                *f_ub = path.f_ub;
                *found = true;
                DepinStatus::Ok
            }
            Ok(None) => {
                *f_ub = f64::NAN;
                *found = false;
                DepinStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
