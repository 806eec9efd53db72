#ifndef NAVSIM_H
#define NAVSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NavsimStatus {
  NAVSIM_STATUS_OK = 0,
  NAVSIM_STATUS_NULL_POINTER = 1,
  NAVSIM_STATUS_INVALID_ARGUMENT = 2,
  NAVSIM_STATUS_CONFIG_ERROR = 3,
  NAVSIM_STATUS_NUMERICAL_ERROR = 4,
  NAVSIM_STATUS_IO_ERROR = 5,
  NAVSIM_STATUS_PANIC = 6,
} NavsimStatus;

typedef enum NavsimAlgorithm {
  NAVSIM_ALGORITHM_DERIVED = 0,
  NAVSIM_ALGORITHM_TN = 1,
  NAVSIM_ALGORITHM_SV1 = 2,
  NAVSIM_ALGORITHM_SV2 = 3,
} NavsimAlgorithm;

/**
 * Opaque handle to a finished run.
 */
typedef struct NavsimRunResult NavsimRunResult;

/**
 * Opaque scenario handle.
 */
typedef struct NavsimScenario NavsimScenario;

/**
 * Headline numbers of a run. Errors are estimate minus truth, components
 * ordered north, up, east.
 */
typedef struct NavsimSummary {
  size_t epochs;
  double max_horiz_pos_err_m;
  double max_horiz_vel_err_mps;
  double final_horiz_pos_err_m;
  double final_vel_err_mps[3];
  double final_pos_err_m[3];
  double max_abs_vert_vel_err_mps;
  double max_dcm_orthonormality_error;
} NavsimSummary;

/**
 * Errors at one epoch.
 */
typedef struct NavsimEpoch {
  double t_s;
  double vel_err_mps[3];
  double pos_err_m[3];
  double horiz_pos_err_m;
} NavsimEpoch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *navsim_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *navsim_version(void);

/**
 * Scenario A: 500 m/s due east at 30° latitude, T = 0.02 s, one hour.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NavsimStatus navsim_scenario_a(struct NavsimScenario **out);

/**
 * Scenario B: east acceleration 10 sin(0.02πt) m/s², two hours.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NavsimStatus navsim_scenario_b(struct NavsimScenario **out);

/**
 * Level flight due east. `accel_mps2 = 0` gives constant speed; otherwise
 * the east acceleration is `accel_mps2 sin(omega_rad_s t)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NavsimStatus navsim_scenario_new(double lat_deg,
                                      double ve0_mps,
                                      double accel_mps2,
                                      double omega_rad_s,
                                      double duration_s,
                                      double dt_s,
                                      struct NavsimScenario **out);

/**
 * Scenario from a TOML file in the command-line format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum NavsimStatus navsim_scenario_from_config(const char *path, struct NavsimScenario **out);

/**
 * Number of update intervals in the scenario.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t navsim_scenario_steps(const struct NavsimScenario *scenario);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void navsim_scenario_free(struct NavsimScenario *scenario);

/**
 * Runs one velocity/position algorithm pair over the scenario.
 * `truth_attitude` replaces the gyro-propagated attitude with the truth
 * every interval.
 *
 * # Safety
 * `scenario` must be a live handle and `out` valid for writes.
 */
enum NavsimStatus navsim_run(const struct NavsimScenario *scenario,
                             enum NavsimAlgorithm vel_alg,
                             enum NavsimAlgorithm pos_alg,
                             bool truth_attitude,
                             struct NavsimRunResult **out);

/**
 * # Safety
 * `result` must be a live handle and `out` valid for writes.
 */
enum NavsimStatus navsim_run_summary(const struct NavsimRunResult *result,
                                     struct NavsimSummary *out);

/**
 * Errors at epoch `k` (0 is the initial state).
 *
 * # Safety
 * `result` must be a live handle and `out` valid for writes.
 */
enum NavsimStatus navsim_run_epoch(const struct NavsimRunResult *result,
                                   size_t k,
                                   struct NavsimEpoch *out);

/**
 * Writes the error series in the command-line CSV format.
 *
 * # Safety
 * `result` must be a live handle and `path` a NUL-terminated string.
 */
enum NavsimStatus navsim_run_write_csv(const struct NavsimRunResult *result, const char *path);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void navsim_run_free(struct NavsimRunResult *result);

/**
 * Sculling-corrected velocity increment in the body frame at the start of
 * the interval, from two half-interval gyro (rad) and accelerometer (m/s)
 * increments.
 *
 * # Safety
 * Every pointer must reference 3 doubles.
 */
enum NavsimStatus navsim_sculling(const double *dtheta1,
                                  const double *dtheta2,
                                  const double *dv1,
                                  const double *dv2,
                                  double dt,
                                  double *out);

/**
 * Scrolling double integral (m) in the body frame at the start of the
 * interval.
 *
 * # Safety
 * Every pointer must reference 3 doubles.
 */
enum NavsimStatus navsim_scrolling(const double *dtheta1,
                                   const double *dtheta2,
                                   const double *dv1,
                                   const double *dv2,
                                   double dt,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NAVSIM_H */
