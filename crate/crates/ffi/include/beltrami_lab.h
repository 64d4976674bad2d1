#ifndef BELTRAMI_LAB_H
#define BELTRAMI_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_UNKNOWN_NAME = 3,
  BL_STATUS_NOT_PERPENDICULAR = 4,
  BL_STATUS_INAPPLICABLE = 5,
  /**
   * A numerical check or certificate did not hold.
   */
  BL_STATUS_VERIFICATION = 6,
  BL_STATUS_IO = 7,
  BL_STATUS_PANIC = 8,
} BlStatus;

typedef enum BlVerdict {
  BL_VERDICT_TIGHT = 0,
  BL_VERDICT_OVERTWISTED = 1,
  BL_VERDICT_INCONCLUSIVE = 2,
} BlVerdict;

/**
 * Opaque field handle.
 */
typedef struct BlField BlField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *bl_last_error(void);

/**
 * Axisymmetric sphere eigenfield with eigenvalue `2m`, `|m| >= 2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_field_sphere_vm(int32_t m, struct BlField **out);

/**
 * Named sphere example: `hopf`, `antihopf`, `v2`, `v3` or `nonaxisymmetric`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` valid for writes.
 */
enum BlStatus bl_field_sphere_builtin(const char *name, struct BlField **out);

/**
 * Standard torus field `sin(m x3) d/dx1 + cos(m x3) d/dx2`, `m > 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_field_torus_standard(int64_t m, struct BlField **out);

/**
 * Single-mode torus eigenfield with wave vector `k` and amplitude
 * `b_num / b_den`, which must be perpendicular to `k`.
 *
 * # Safety
 * `k` and `b_num` must point to three `int64_t` each; `out` must be valid
 * for writes.
 */
enum BlStatus bl_field_torus_wave(const int64_t *k,
                                  const int64_t *b_num,
                                  int64_t b_den,
                                  struct BlField **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `field` must come from a `bl_field_*` constructor and not be used again.
 */
void bl_field_free(struct BlField *field);

/**
 * Curl eigenvalue of the field. Fails with `Inapplicable` when the field
 * is Beltrami with a nonconstant factor.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_field_eigenvalue(const struct BlField *field, double *out);

/**
 * Relative residual of `curl V = lambda V` on a `grid^3` lattice using
 * Richardson-extrapolated differences with step `h`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_field_eig_residual(const struct BlField *field,
                                    size_t grid,
                                    double h,
                                    double *out);

/**
 * Tight/overtwisted verdict of the dual contact form.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_field_classify(const struct BlField *field,
                                size_t nodal_grid,
                                enum BlVerdict *out);

/**
 * Full contact report as JSON. Release the string with [`bl_string_free`].
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_field_report_json(const struct BlField *field,
                                   size_t grid,
                                   double h,
                                   size_t nodal_grid,
                                   char **out);

/**
 * Hopf invariant of the unit-normalized axisymmetric eigenfield with
 * eigenvalue `m`, by quadrature and rounded to the nearest integer.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_hopf_invariant_vm(int32_t m, int64_t *out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void bl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELTRAMI_LAB_H */
