/* SPDX-License-Identifier: Apache-2.0 */

#ifndef ROUGHLIFT_H
#define ROUGHLIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_INVALID_ARGUMENT = 2,
  RL_STATUS_DIMENSION_MISMATCH = 3,
  RL_STATUS_NOT_STABLE = 4,
  RL_STATUS_NUMERICAL = 5,
  RL_STATUS_PANIC = 6,
} RlStatus;

typedef enum RlFbmMethod {
  RL_FBM_METHOD_CIRCULANT = 0,
  RL_FBM_METHOD_CHOLESKY = 1,
} RlFbmMethod;

/**
 * Opaque stable drift `M = A - B`.
 */
typedef struct RlDrift RlDrift;

/**
 * Opaque lifted path.
 */
typedef struct RlLiftedPath RlLiftedPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rl_last_error_message(char *buf, size_t len);

/**
 * Lift the piecewise-linear path through `points` (`n_points × dim`) at `times`.
 *
 * # Safety
 * `times` must hold `n_points` values, `points` `n_points * dim` values, and
 * `out` must be a valid pointer to a handle slot.
 */
enum RlStatus rl_path_lift_piecewise_linear(const double *times,
                                            const double *points,
                                            size_t n_points,
                                            size_t dim,
                                            struct RlLiftedPath **out);

/**
 * # Safety
 * `path` must be null or a handle returned by this library, not yet freed.
 */
void rl_path_free(struct RlLiftedPath *path);

/**
 * Number of grid points; 0 for a null handle.
 *
 * # Safety
 * `path` must be null or a live handle.
 */
size_t rl_path_len(const struct RlLiftedPath *path);

/**
 * Path dimension; 0 for a null handle.
 *
 * # Safety
 * `path` must be null or a live handle.
 */
size_t rl_path_dim(const struct RlLiftedPath *path);

/**
 * Increment lift between grid points `i ≤ j`: `level1` gets `dim` values,
 * `level2` gets `dim * dim` row-major values.
 *
 * # Safety
 * `path` must be a live handle and the outputs large enough.
 */
enum RlStatus rl_path_interval(const struct RlLiftedPath *path,
                               size_t i,
                               size_t j,
                               double *level1,
                               double *level2);

/**
 * New handle with every interval lift shifted by `(t - s) v` on level 2.
 *
 * # Safety
 * `path` must be a live handle, `v` must hold `dim * dim` values, `out` a valid slot.
 */
enum RlStatus rl_path_translate(const struct RlLiftedPath *path,
                                const double *v,
                                struct RlLiftedPath **out);

/**
 * Inhomogeneous α-Hölder distance between two lifts on the same grid.
 *
 * # Safety
 * `x`, `y` must be live handles and `out` writable.
 */
enum RlStatus rl_holder_distance(const struct RlLiftedPath *x,
                                 const struct RlLiftedPath *y,
                                 double alpha,
                                 double *out);

/**
 * Drift `M = A - B` from symmetric positive definite `A` and antisymmetric `B`.
 *
 * # Safety
 * `a`, `b` must hold `dim * dim` values and `out` must be a valid slot.
 */
enum RlStatus rl_drift_new(const double *a, const double *b, size_t dim, struct RlDrift **out);

/**
 * # Safety
 * `drift` must be null or a live handle.
 */
void rl_drift_free(struct RlDrift *drift);

/**
 * Stationary covariance `C` with `MC + CM^T = I`, written row-major.
 *
 * # Safety
 * `drift` must be a live handle and `out` hold `dim * dim` values.
 */
enum RlStatus rl_lyapunov_c(const struct RlDrift *drift, double *out);

/**
 * Counter-term `v = -½(MC - CM^T)`, written row-major.
 *
 * # Safety
 * `drift` must be a live handle and `out` hold `dim * dim` values.
 */
enum RlStatus rl_renorm_v(const struct RlDrift *drift, double *out);

/**
 * Lead-lag counter-term in `R^{2d × 2d}` (row-major) and its scalar size.
 *
 * # Safety
 * `out` must hold `4 d²` values; `v_scalar` may be null.
 */
enum RlStatus rl_leadlag_counter_term(double hurst,
                                      size_t n,
                                      size_t d,
                                      double *out,
                                      double *v_scalar);

/**
 * Second moment `ψ(n, K)` of a `K`-block of the off-diagonal quadratic variation.
 *
 * # Safety
 * `out` must be writable.
 */
enum RlStatus rl_psi(size_t n, size_t k, double hurst, double *out);

/**
 * Sample `d` independent fBm components on `i T / n`, written as
 * `(n + 1) × d` row-major values starting at the origin.
 *
 * # Safety
 * `out` must hold `(n + 1) * d` values.
 */
enum RlStatus rl_fbm_sample(uint64_t seed,
                            double hurst,
                            size_t n,
                            size_t d,
                            double horizon,
                            enum RlFbmMethod method,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROUGHLIFT_H */
