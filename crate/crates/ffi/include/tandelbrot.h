#ifndef TANDELBROT_H
#define TANDELBROT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TdbFamily {
  TDB_FAMILY_TANGENT = 0,
  TDB_FAMILY_NEWTON = 1,
} TdbFamily;

// Result code of every fallible call.
typedef enum TdbStatus {
  TDB_STATUS_OK = 0,
  // A required pointer argument was null.
  TDB_STATUS_NULL_POINTER = 1,
  // A numeric argument was malformed (non-finite, zero-sized, ...).
  TDB_STATUS_INVALID_ARGUMENT = 2,
  // The parameter or point lies outside the domain of the map.
  TDB_STATUS_DOMAIN = 3,
  // An iterative solver did not converge.
  TDB_STATUS_NO_CONVERGENCE = 4,
  // Unexpected internal failure; the library caught a panic.
  TDB_STATUS_INTERNAL = 5,
} TdbStatus;

// Opaque handle to a map `T_α`.
typedef struct TdbTangent TdbTangent;

// Opaque handle to a rendered fate grid.
typedef struct TdbTile TdbTile;

typedef struct TdbComplex {
  double re;
  double im;
} TdbComplex;

// A point on the Riemann sphere: `is_infinity` set means `z` is unused.
typedef struct TdbSpherePoint {
  struct TdbComplex z;
  bool is_infinity;
} TdbSpherePoint;

// Fate codes match the tile format: 0 captured (or converged to a root),
// 1 attracting cycle, 2 pole hit, 3 undecided. `period`, `multiplier`
// and `representative` are meaningful only for fate 1.
typedef struct TdbOrbitResult {
  uint8_t fate;
  uint32_t steps;
  uint32_t period;
  struct TdbComplex multiplier;
  struct TdbComplex representative;
} TdbOrbitResult;

typedef struct TdbModelConstants {
  double p_star;
  double t;
  double c;
} TdbModelConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *tdb_last_error_message(void);

enum TdbStatus tdb_tangent_new(struct TdbComplex alpha, struct TdbTangent **out_handle);

void tdb_tangent_free(struct TdbTangent *h);

// `T_α(z)` on the sphere; pole inputs yield `is_infinity`.
enum TdbStatus tdb_tangent_eval(const struct TdbTangent *h,
                                struct TdbComplex z,
                                struct TdbSpherePoint *result);

enum TdbStatus tdb_tangent_derivative(const struct TdbTangent *h,
                                      struct TdbComplex z,
                                      struct TdbComplex *result);

// Classifies the orbit of `z0` under `T_α` (`|α| < 1`). `max_iter = 0`
// selects the library default.
enum TdbStatus tdb_tangent_classify(const struct TdbTangent *h,
                                    struct TdbComplex z0,
                                    uint32_t max_iter,
                                    struct TdbOrbitResult *result);

// Orbit of the free asymptotic value 0 under the Newton map `N_a`.
// A converged root is reported as fate 0 with the root in
// `representative`.
enum TdbStatus tdb_newton_classify(struct TdbComplex a,
                                   uint32_t max_iter,
                                   struct TdbOrbitResult *result);

// Parameter report for `α` as a JSON string; free it with
// [`tdb_string_free`].
enum TdbStatus tdb_analyze_json(struct TdbComplex alpha, char **out_json);

void tdb_string_free(char *s);

enum TdbStatus tdb_model_constants(struct TdbModelConstants *result);

// Renders the parameter plane of `family` on a `px × py` viewport.
enum TdbStatus tdb_render_parameter_plane(enum TdbFamily family,
                                          struct TdbComplex center,
                                          double width,
                                          uint32_t px,
                                          uint32_t py,
                                          uint32_t max_iter,
                                          struct TdbTile **out_tile);

// Renders the dynamical plane of `T_param` or `N_param`.
enum TdbStatus tdb_render_dynamical_plane(enum TdbFamily family,
                                          struct TdbComplex param,
                                          struct TdbComplex center,
                                          double width,
                                          uint32_t px,
                                          uint32_t py,
                                          uint32_t max_iter,
                                          struct TdbTile **out_tile);

void tdb_tile_free(struct TdbTile *t);

enum TdbStatus tdb_tile_size(const struct TdbTile *t, uint32_t *px, uint32_t *py);

// Borrowed views of the three per-pixel arrays, each `px·py` long and
// valid while the tile lives. Any out-pointer may be null to skip it.
enum TdbStatus tdb_tile_data(const struct TdbTile *t,
                             const uint8_t **fate,
                             const uint32_t **value,
                             const float **aux);

// The tile in its binary wire format; free with [`tdb_bytes_free`].
enum TdbStatus tdb_tile_encode(const struct TdbTile *t, uint8_t **out_bytes, size_t *out_len);

void tdb_bytes_free(uint8_t *bytes, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TANDELBROT_H */
