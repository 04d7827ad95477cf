#ifndef LATERAL_ZDA_H
#define LATERAL_ZDA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZdaStatus {
  ZDA_STATUS_OK = 0,
  ZDA_STATUS_NULL_POINTER = 1,
  ZDA_STATUS_INVALID_PARAMETER = 2,
  ZDA_STATUS_DEGENERATE_GEOMETRY = 3,
  ZDA_STATUS_CONFIG = 4,
  ZDA_STATUS_IO = 5,
  ZDA_STATUS_PARSE = 6,
  ZDA_STATUS_OUT_OF_RANGE = 7,
  ZDA_STATUS_PANIC = 8,
} ZdaStatus;

typedef enum ZdaOutputCase {
  ZDA_OUTPUT_CASE_YAW_RATE = 0,
  ZDA_OUTPUT_CASE_LATERAL_ACCEL = 1,
  ZDA_OUTPUT_CASE_BOTH = 2,
} ZdaOutputCase;

typedef enum ZdaObservability {
  ZDA_OBSERVABILITY_STRONGLY_OBSERVABLE = 0,
  ZDA_OBSERVABILITY_STRONGLY_DETECTABLE_ONLY = 1,
  ZDA_OBSERVABILITY_NOT_STRONGLY_DETECTABLE = 2,
} ZdaObservability;

/**
 * Opaque lateral model.
 */
typedef struct ZdaModel ZdaModel;

/**
 * Opaque simulated trajectory.
 */
typedef struct ZdaTrajectory ZdaTrajectory;

/**
 * Vehicle constants in SI units.
 */
typedef struct ZdaVehicleParams {
  double mass;
  double yaw_inertia;
  double front_axle;
  double rear_axle;
  double front_stiffness;
  double rear_stiffness;
} ZdaVehicleParams;

typedef struct ZdaCoefficients {
  double vx;
  double a11;
  double a12;
  double a21;
  double a22;
  double b2;
  double e1;
  double e2;
} ZdaCoefficients;

typedef struct ZdaZeroReport {
  /**
   * False when the output case has no invariant zero; `zero` is then 0.
   */
  bool has_zero;
  double zero;
  bool stable;
  enum ZdaObservability classification;
  bool attack_exists;
  bool disruptive;
} ZdaZeroReport;

typedef struct ZdaSample {
  double t;
  double vy;
  double r;
  double ay;
  double ax;
  double delta;
  double mz_attack;
} ZdaSample;

typedef struct ZdaDetectorConfig {
  double ay_quiet_threshold;
  double ax_alarm_threshold;
  double window;
} ZdaDetectorConfig;

typedef struct ZdaVerdict {
  bool attacked;
  /**
   * Meaningful only when `attacked` is true.
   */
  double first_alarm_time;
  double peak_ax;
} ZdaVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the buffer size needed to hold
 * the full message including the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be NULL or point to at least `len` writable bytes.
 */
size_t zda_last_error_message(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *zda_status_name(enum ZdaStatus status);

/**
 * Table values of the reference SUV.
 */
struct ZdaVehicleParams zda_suv_params(void);

/**
 * Builds a model at speed `vx`. Release with [`zda_model_free`].
 *
 * # Safety
 * `params` must point to a valid `ZdaVehicleParams`; `out` must be writable.
 */
enum ZdaStatus zda_model_new(const struct ZdaVehicleParams *params,
                             double vx,
                             struct ZdaModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`zda_model_new`] not yet freed.
 */
void zda_model_free(struct ZdaModel *model);

/**
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ZdaStatus zda_model_coefficients(const struct ZdaModel *model, struct ZdaCoefficients *out);

/**
 * Eigenvalues of the state matrix, ascending by real part.
 *
 * # Safety
 * `model` must be a live handle; `re` and `im` must each point to two
 * writable doubles.
 */
enum ZdaStatus zda_model_eigenvalues(const struct ZdaModel *model, double *re, double *im);

/**
 * Hurwitz margin `(a+b)^2 - m (a Cf - b Cr) vx^2 / (Cf Cr)` in m^2.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ZdaStatus zda_model_stability_margin(const struct ZdaModel *model, double *out);

/**
 * `a Cf - b Cr` in N m/rad; negative keeps the lateral-acceleration zero stable.
 *
 * # Safety
 * `params` must point to a valid `ZdaVehicleParams`; `out` must be writable.
 */
enum ZdaStatus zda_disruptive_condition(const struct ZdaVehicleParams *params, double *out);

/**
 * Invariant zero and observability class for one output case.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum ZdaStatus zda_classify(const struct ZdaModel *model,
                            enum ZdaOutputCase case_,
                            struct ZdaZeroReport *out);

/**
 * Simulates a built-in preset ("fig3".."fig6"). Release with
 * [`zda_trajectory_free`].
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum ZdaStatus zda_simulate_preset(const char *name, struct ZdaTrajectory **out);

/**
 * Simulates the TOML scenario file at `path`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum ZdaStatus zda_simulate_scenario_file(const char *path, struct ZdaTrajectory **out);

/**
 * # Safety
 * `traj` must be NULL or a live trajectory handle.
 */
void zda_trajectory_free(struct ZdaTrajectory *traj);

/**
 * Number of samples; 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live trajectory handle.
 */
size_t zda_trajectory_len(const struct ZdaTrajectory *traj);

/**
 * True if the run stopped at the state-norm ceiling; the stop time goes to
 * `t_out` when it is not NULL.
 *
 * # Safety
 * `traj` must be NULL or a live trajectory handle; `t_out` NULL or writable.
 */
bool zda_trajectory_diverged(const struct ZdaTrajectory *traj, double *t_out);

/**
 * # Safety
 * `traj` must be a live trajectory handle; `out` must be writable.
 */
enum ZdaStatus zda_trajectory_sample(const struct ZdaTrajectory *traj,
                                     size_t index,
                                     struct ZdaSample *out);

struct ZdaDetectorConfig zda_detector_default(void);

/**
 * Runs the longitudinal-acceleration detector. A NULL `cfg` uses defaults.
 *
 * # Safety
 * `traj` must be a live handle; `cfg` NULL or valid; `out` writable.
 */
enum ZdaStatus zda_detect(const struct ZdaTrajectory *traj,
                          const struct ZdaDetectorConfig *cfg,
                          struct ZdaVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATERAL_ZDA_H */
