#ifndef FRENET_RT_H
#define FRENET_RT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FrtStatus {
  FRT_STATUS_OK = 0,
  FRT_STATUS_NULL_POINTER = 1,
  FRT_STATUS_INVALID_ARGUMENT = 2,
  FRT_STATUS_CONFIG_INVALID = 3,
  /**
   * The reference path was rejected (degenerate, self-intersecting or too curved).
   */
  FRT_STATUS_INVALID_PATH = 4,
  FRT_STATUS_OUTSIDE_PROJECTION_DOMAIN = 5,
  FRT_STATUS_ALL_INFEASIBLE = 6,
  FRT_STATUS_BUFFER_TOO_SMALL = 7,
  FRT_STATUS_PANIC = 99,
} FrtStatus;

/**
 * Opaque planner handle.
 */
typedef struct FrtPlanner FrtPlanner;

typedef struct FrtSettings {
  double resample_step;
  double kappa_bound;
  double tau_min;
  double tau_max;
  size_t n_tau;
  double d_min;
  double d_max;
  size_t n_d;
  double v_min;
  double v_max;
  size_t n_v;
  double dt;
  size_t horizon_steps;
  double wheelbase;
  double delta_max;
  double a_min;
  double a_max;
  double kappa_dot_max;
  double length;
  double width;
  double w_ref;
  double w_vel;
  double w_lat;
  double w_lon;
  double v_des;
  double p_exponent;
} FrtSettings;

typedef struct FrtPoint {
  double x;
  double y;
} FrtPoint;

typedef struct FrtObstaclePose {
  double t;
  double x;
  double y;
  double theta;
} FrtObstaclePose;

/**
 * Rectangular obstacle; `poses` must hold `pose_count` entries with
 * strictly increasing `t`.
 */
typedef struct FrtObstacle {
  uint32_t id;
  double half_length;
  double half_width;
  const struct FrtObstaclePose *poses;
  size_t pose_count;
} FrtObstacle;

typedef struct FrtEvState {
  double x;
  double y;
  double v;
  double a;
  double theta;
} FrtEvState;

typedef struct FrtTrajectoryPoint {
  double t;
  double x;
  double y;
  double theta;
  double v;
  double a;
  double kappa;
  double s;
  double d;
} FrtTrajectoryPoint;

/**
 * Per-cycle summary filled by `frt_planner_plan`.
 */
typedef struct FrtPlanInfo {
  size_t optimal_index;
  size_t candidate_count;
  size_t feasible_count;
  double cost;
  /**
   * Rejections per constraint: accel, curvature, curvature rate, yaw
   * rate, projection, collision.
   */
  size_t violation_counts[6];
} FrtPlanInfo;

typedef struct FrtFrenetState {
  double s;
  double s_dot;
  double s_ddot;
  double d;
  double d_dot;
  double d_ddot;
} FrtFrenetState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Writes the default settings into `out`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum FrtStatus frt_settings_default(struct FrtSettings *out);

/**
 * Builds a planner from `point_count` path points. `settings` may be null
 * for defaults. On success `*out` owns a handle to release with
 * `frt_planner_free`.
 *
 * # Safety
 * `points` must hold `point_count` readable entries, `settings` must be
 * null or readable and `out` must be valid for writes.
 */
enum FrtStatus frt_planner_new(const struct FrtPoint *points,
                               size_t point_count,
                               const struct FrtSettings *settings,
                               struct FrtPlanner **out);

/**
 * Releases a planner. Null is ignored.
 *
 * # Safety
 * `planner` must be null or a handle from `frt_planner_new` not yet freed.
 */
void frt_planner_free(struct FrtPlanner *planner);

/**
 * Replaces the obstacle set used by subsequent cycles. The data is copied.
 *
 * # Safety
 * `planner` must be a live handle; `obstacles` must hold `count` entries
 * (may be null when `count` is 0), each with valid `poses`.
 */
enum FrtStatus frt_planner_set_obstacles(struct FrtPlanner *planner,
                                         const struct FrtObstacle *obstacles,
                                         size_t count);

/**
 * Runs one planning cycle and copies the optimal trajectory into `out`.
 *
 * `*out_len` receives the number of points (also when the buffer is too
 * small, so callers can size it). `info` may be null.
 *
 * # Safety
 * `planner` must be a live handle, `state` readable, `out` writable for
 * `capacity` entries, `out_len` writable and `info` null or writable.
 */
enum FrtStatus frt_planner_plan(struct FrtPlanner *planner,
                                const struct FrtEvState *state,
                                struct FrtTrajectoryPoint *out,
                                size_t capacity,
                                size_t *out_len,
                                struct FrtPlanInfo *info);

/**
 * Projects a Cartesian state onto the planner's reference frame.
 *
 * # Safety
 * `planner` must be a live handle, `state` readable and `out` writable.
 */
enum FrtStatus frt_planner_cart_to_frenet(const struct FrtPlanner *planner,
                                          const struct FrtEvState *state,
                                          struct FrtFrenetState *out);

/**
 * Arc length of the resampled reference path.
 *
 * # Safety
 * `planner` must be a live handle and `out` writable.
 */
enum FrtStatus frt_planner_path_length(const struct FrtPlanner *planner, double *out);

/**
 * Points per trajectory for the planner's horizon, for sizing buffers.
 *
 * # Safety
 * `planner` must be null or a live handle.
 */
size_t frt_planner_trajectory_len(const struct FrtPlanner *planner);

/**
 * Detail message of the last failed call on this planner, or an empty
 * string. Valid until the next call on the same handle.
 *
 * # Safety
 * `planner` must be null or a live handle.
 */
const char *frt_planner_last_error(const struct FrtPlanner *planner);

/**
 * Static description of a status code.
 */
const char *frt_status_string(enum FrtStatus status);

/**
 * Library version, e.g. "0.1.0".
 */
const char *frt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRENET_RT_H */
