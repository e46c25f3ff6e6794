#ifndef MERIDIAN_LAB_H
#define MERIDIAN_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MlStatus {
  ML_STATUS_OK = 0,
  ML_STATUS_NULL_POINTER = 1,
  ML_STATUS_INVALID_UTF8 = 2,
  ML_STATUS_CONFIG = 3,
  ML_STATUS_DOMAIN = 4,
  ML_STATUS_FRAME = 5,
  ML_STATUS_REGIME = 6,
  ML_STATUS_SINGULAR_LAMBDA = 7,
  ML_STATUS_ODE = 8,
  ML_STATUS_IO = 9,
  ML_STATUS_PANIC = 10,
} MlStatus;

/**
 * Opaque surface handle.
 */
typedef struct MlSurface MlSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a surface from a JSON config (same schema as the CLI).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MlStatus ml_surface_from_json(const char *json, struct MlSurface **out);

/**
 * # Safety
 * `s` must be null or a handle from [`ml_surface_from_json`] not yet freed.
 */
void ml_surface_free(struct MlSurface *s);

/**
 * Writes the parameter domain as `u0, u1, v0, v1`.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 4 doubles.
 */
enum MlStatus ml_surface_domain(const struct MlSurface *s, double *out);

/**
 * `z(u, v)` as 4 doubles `x1..x4`.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 4 doubles.
 */
enum MlStatus ml_surface_immersion(const struct MlSurface *s, double u, double v, double *out);

/**
 * Frame `x, y, n1, n2` as 16 doubles, one vector after another.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 16 doubles.
 */
enum MlStatus ml_surface_frame(const struct MlSurface *s, double u, double v, double *out);

/**
 * `G = x ^ y` in the order `(12, 13, 14, 23, 24, 34)`.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 6 doubles.
 */
enum MlStatus ml_surface_gauss_map(const struct MlSurface *s, double u, double v, double *out);

/**
 * Closed-form `Delta G`.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 6 doubles.
 */
enum MlStatus ml_surface_laplacian_closed(const struct MlSurface *s,
                                          double u,
                                          double v,
                                          double *out);

/**
 * Finite-difference `Delta G` with arc-length step `h`.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold 6 doubles.
 */
enum MlStatus ml_surface_laplacian_fd(const struct MlSurface *s,
                                      double u,
                                      double v,
                                      double h,
                                      double *out);

/**
 * Classifies on the config grid. `tolerances_json` may be null for the
 * defaults. The verdict JSON goes to `*out`; free it with [`ml_string_free`].
 *
 * # Safety
 * `s` must be a live handle, `tolerances_json` null or NUL-terminated,
 * `out` a valid pointer.
 */
enum MlStatus ml_surface_classify_json(const struct MlSurface *s,
                                       const char *tolerances_json,
                                       char **out);

/**
 * The config the handle was built from, re-serialized.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum MlStatus ml_surface_config_json(const struct MlSurface *s, char **out);

/**
 * # Safety
 * `p` must be null or a string returned by this library, not yet freed.
 */
void ml_string_free(char *p);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ml_last_error_message(void);

/**
 * NUL-terminated library version.
 */
const char *ml_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MERIDIAN_LAB_H */
