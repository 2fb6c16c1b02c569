/* C interface for the depinning simulator and certificate toolkit. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of any API call. Anything but `Ok` leaves a human-readable
 * message readable through `depin_last_error`.
 */
enum DepinStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  DEPIN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DEPIN_STATUS_NULL_ARGUMENT = 1,
  /**
   * Arguments failed validation (ranges, grid shape, geometry).
   */
  DEPIN_STATUS_INVALID_PARAM = 2,
  /**
   * The computation itself failed (e.g. a front left the stored band).
   */
  DEPIN_STATUS_RUNTIME_ERROR = 3,
  /**
   * A panic was caught at the boundary; state may be inconsistent.
   */
  DEPIN_STATUS_INTERNAL_PANIC = 4,
};
#ifndef __cplusplus
typedef int32_t DepinStatus;
#endif // __cplusplus

/**
 * Opaque random obstacle field. Thread-confined: do not share one handle
 * across threads without external synchronization.
 */
typedef struct DepinField DepinField;

/**
 * Outcome of a single relaxation run.
 */
typedef struct DepinOutcome {
  /**
   * 0 = pinned, 1 = ballistic, 2 = undecided at the time horizon.
   */
  int32_t tag;
  /**
   * Simulated time at which the classification fired.
   */
  double t_decided;
  /**
   * Explicit Euler steps taken.
   */
  uint64_t steps;
  /**
   * Mean vertical velocity near the end (NaN unless ballistic).
   */
  double mean_velocity;
  /**
   * Mean front height when the run stopped.
   */
  double final_mean_height;
} DepinOutcome;

/**
 * Bisection estimate of the critical driving force.
 */
typedef struct DepinCritical {
  /**
   * Midpoint of the final bracket.
   */
  double f_crit;
  /**
   * Highest force that did not run ballistic.
   */
  double bracket_lo;
  /**
   * Lowest force that ran ballistic.
   */
  double bracket_hi;
  /**
   * 1 when the bracket closed below the requested tolerance.
   */
  int32_t converged;
  /**
   * Probes that hit the time horizon without classifying.
   */
  uint64_t undecided_probes;
} DepinCritical;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *depin_version(void);

/**
 * Message describing this thread's most recent failure (empty string if
 * none). Valid until the next failing call on the same thread.
 */
const char *depin_last_error(void);

/**
 * Samples a Poisson obstacle field on the periodic strip
 * `[0, width) x [y_min, y_max]`. `rho` is the areal density, `f` the
 * pinning strength, `r0 < r1` the plateau and support radii of one
 * obstacle. On success `*out` owns the field; release it with
 * `depin_field_free`.
 *
 * # Safety
 *
 * `out` must be a valid location to store one pointer.
 */
DepinStatus depin_field_generate(double rho,
                                 double f,
                                 double r0,
                                 double r1,
                                 uint64_t seed,
                                 double width,
                                 double y_min,
                                 double y_max,
                                 struct DepinField **out);

/**
 * Releases a field handle. Passing null is a no-op; passing the same
 * handle twice is undefined behavior.
 *
 * # Safety
 *
 * `field` must be null or a handle from `depin_field_generate` not yet freed.
 */
void depin_field_free(struct DepinField *field);

/**
 * Domain width of the field (the x-period).
 *
 * # Safety
 *
 * `field` must be a live handle; `out` must be valid for one double.
 */
DepinStatus depin_field_width(const struct DepinField *field, double *out);

/**
 * Grows the stored obstacle band so heights up to `y_max` can be probed.
 * Extension replays the same per-strip random streams, so values already
 * observed do not change.
 *
 * # Safety
 *
 * `field` must be a live handle with no concurrent use.
 */
DepinStatus depin_field_extend(struct DepinField *field, double y_max);

/**
 * Total pinning strength at `(x, y)`; `x` is reduced modulo the width,
 * `y` must lie inside the stored band (extend first if needed).
 *
 * # Safety
 *
 * `field` must be a live handle; `out` must be valid for one double.
 */
DepinStatus depin_field_phi(const struct DepinField *field, double x, double y, double *out);

/**
 * Relaxes a flat front driven by `force` under the kinetics
 * `epsilon v + tau sign(v)`, on a grid of spacing ~`dx`, until it is
 * classified as pinned, ballistic (mean height beyond `h_ballistic`), or
 * the horizon `t_max` expires. The band is grown on demand.
 *
 * # Safety
 *
 * `field` must be a live handle with no concurrent use; `out` must be valid for one `DepinOutcome`.
 */
DepinStatus depin_simulate(struct DepinField *field,
                           double epsilon,
                           double tau,
                           double force,
                           double dx,
                           double t_max,
                           double h_ballistic,
                           struct DepinOutcome *out);

/**
 * Brackets and bisects the critical force for this realization down to
 * `tol_f`. Kinetics, grid, horizon, and escape height are as in
 * `depin_simulate`.
 *
 * # Safety
 *
 * `field` must be a live handle with no concurrent use; `out` must be valid for one `DepinCritical`.
 */
DepinStatus depin_critical_force(struct DepinField *field,
                                 double epsilon,
                                 double tau,
                                 double dx,
                                 double t_max,
                                 double h_ballistic,
                                 double tol_f,
                                 struct DepinCritical *out);

/**
 * Searches for the strongest pinning lower bound provable by a
 * stationary barrier in this realization. On success `*found` says
 * whether a certificate exists; if so `*f_certified` is the force up to
 * which the field provably pins a flat front under friction `tau`.
 *
 * # Safety
 *
 * `field` must be a live handle with no concurrent use; `f_certified` and `found` must be valid destinations.
 */
DepinStatus depin_lower_certificate(struct DepinField *field,
                                    double tau,
                                    double tol_f,
                                    double *f_certified,
                                    bool *found);

/**
 * Searches for an open corridor of obstacle-free cubes of side `h`
 * crossing the band. On success `*found` says whether one exists; if so
 * `*f_ub` is the certified upper bound `tau + 2/h` on the critical
 * force.
 *
 * # Safety
 *
 * `field` must be a live handle; `f_ub` and `found` must be valid destinations.
 */
DepinStatus depin_upper_certificate(const struct DepinField *field,
                                    double h,
                                    double tau,
                                    double *f_ub,
                                    bool *found);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
