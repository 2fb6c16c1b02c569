//! Exercises the C entry points from Rust: status codes, error strings,
//! handle lifecycle, and agreement with the underlying library on an
//! obstacle-free field where every answer is known in closed form.

use std::ffi::CStr;
use std::ptr;

use depinning_ffi::*;

unsafe fn cstr(p: *const std::ffi::c_char) -> String {
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

/// Deterministically obstacle-free: the expected count in the band is
/// ~1e-7, and the fixed seed draws none.
unsafe fn free_field() -> *mut DepinField {
    let mut f: *mut DepinField = ptr::null_mut();
    let st = depin_field_generate(1e-9, 1.0, 0.1, 0.2, 5, 8.0, -2.0, 12.0, &mut f);
    assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
    assert!(!f.is_null());
    f
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { cstr(depin_version()) };
    assert!(v.starts_with("depinning "), "got {v}");
}

#[test]
fn null_and_invalid_arguments_set_the_error_message() {
    unsafe {
        let st = depin_field_generate(1.0, 1.0, 0.1, 0.2, 0, 8.0, -2.0, 2.0, ptr::null_mut());
        assert_eq!(st, DepinStatus::NullArgument);
        assert!(cstr(depin_last_error()).contains("out"));

        let mut f: *mut DepinField = ptr::null_mut();
        let st = depin_field_generate(1.0, 1.0, 0.2, 0.1, 0, 8.0, -2.0, 2.0, &mut f);
        assert_eq!(st, DepinStatus::InvalidParam);
        let msg = cstr(depin_last_error());
        assert!(msg.contains("r1") && msg.contains("r0"), "got {msg}");
        assert!(f.is_null(), "failed generate must not hand out a field");

        // Freeing null is a documented no-op.
        depin_field_free(ptr::null_mut());
    }
}

#[test]
fn field_lifecycle_width_extend_and_phi() {
    unsafe {
        let f = free_field();
        let mut w = 0.0;
        assert_eq!(depin_field_width(f, &mut w), DepinStatus::Ok);
        assert_eq!(w, 8.0);

        let mut v = f64::NAN;
        assert_eq!(depin_field_phi(f, 3.0, 0.5, &mut v), DepinStatus::Ok);
        assert_eq!(v, 0.0);
        depin_field_free(f);

        // A unit-density field has strips of height 8, so a probe at
        // y = 40 leaves the stored band until it is extended.
        let mut f: *mut DepinField = ptr::null_mut();
        let st = depin_field_generate(1.0, 1.0, 0.1, 0.2, 11, 8.0, -2.0, 2.0, &mut f);
        assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
        assert_eq!(depin_field_phi(f, 3.0, 40.0, &mut v), DepinStatus::RuntimeError);
        assert!(!cstr(depin_last_error()).is_empty());
        assert_eq!(depin_field_extend(f, 41.0), DepinStatus::Ok);
        assert_eq!(depin_field_phi(f, 3.0, 40.0, &mut v), DepinStatus::Ok);
        assert!(v >= 0.0);

        depin_field_free(f);
    }
}

#[test]
fn simulate_classifies_pinned_and_ballistic() {
    unsafe {
        let f = free_field();
        let mut o = DepinOutcome {
            tag: -1,
            t_decided: 0.0,
            steps: 0,
            mean_velocity: 0.0,
            final_mean_height: 0.0,
        };
        // Force below the friction threshold: sticks immediately.
        let st = depin_simulate(f, 1.0, 0.4, 0.2, 0.125, 100.0, 1.0, &mut o);
        assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
        assert_eq!(o.tag, 0);
        assert!(o.mean_velocity.is_nan());

        // Well above: runs off ballistically at speed force - tau.
        let st = depin_simulate(f, 1.0, 0.4, 1.4, 0.125, 100.0, 1.0, &mut o);
        assert_eq!(st, DepinStatus::Ok);
        assert_eq!(o.tag, 1);
        assert!((o.mean_velocity - 1.0).abs() < 1e-9);
        assert!(o.final_mean_height >= 1.0);

        // Bad grid spacing is a validation error.
        let st = depin_simulate(f, 1.0, 0.4, 1.4, 9.0, 100.0, 1.0, &mut o);
        assert_eq!(st, DepinStatus::InvalidParam);

        depin_field_free(f);
    }
}

#[test]
fn critical_force_reduces_to_the_friction_without_obstacles() {
    unsafe {
        let f = free_field();
        let mut c = DepinCritical {
            f_crit: 0.0,
            bracket_lo: 0.0,
            bracket_hi: 0.0,
            converged: 0,
            undecided_probes: 0,
        };
        let st = depin_critical_force(f, 1.0, 0.3, 0.125, 800.0, 1.0, 0.01, &mut c);
        assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
        assert_eq!(c.converged, 1);
        assert!(
            (c.f_crit - 0.3).abs() <= 0.01,
            "f_crit {} should sit at the friction 0.3",
            c.f_crit
        );
        assert!(c.bracket_lo <= c.f_crit && c.f_crit <= c.bracket_hi);
        depin_field_free(f);
    }
}

#[test]
fn certificates_on_a_free_field() {
    unsafe {
        let f = free_field();

        // Nothing to pin on: no barrier exists.
        let mut flb = 0.0;
        let mut found = true;
        let st = depin_lower_certificate(f, 0.0, 0.005, &mut flb, &mut found);
        assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
        assert!(!found);

        // Every corridor is open: the bound is tau + 2/h exactly.
        let mut fub = 0.0;
        let st = depin_upper_certificate(f, 1.0, 0.25, &mut fub, &mut found);
        assert_eq!(st, DepinStatus::Ok, "{}", cstr(depin_last_error()));
        assert!(found);
        assert!((fub - 2.25).abs() <= 1e-12, "got {fub}");

        depin_field_free(f);
    }
}

#[test]
fn committed_header_matches_the_generated_one() {
    let generated = std::fs::read_to_string(env!("DEPINNING_GENERATED_HEADER")).expect("generated");
    let committed = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/depinning.h"
    ))
    .expect("committed");
    assert_eq!(
        committed, generated,
        "include/depinning.h is stale; copy the build-generated header over it"
    );
}
