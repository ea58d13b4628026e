#ifndef SHIMURA_VOL_H
#define SHIMURA_VOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum ShvStatus {
  SHV_STATUS_OK = 0,
  SHV_STATUS_NULL_POINTER = 1,
  SHV_STATUS_INVALID_STRING = 2,
  /**
   * The input violates a mathematical constraint (bad discriminant,
   * invariant product, prime, dimension).
   */
  SHV_STATUS_INPUT_ERROR = 3,
  /**
   * Precision loss, quadrature failure or a non-integral inversion.
   */
  SHV_STATUS_NUMERICAL_ERROR = 4,
  /**
   * The two weight routes disagree.
   */
  SHV_STATUS_CROSS_CHECK_FAILED = 5,
  SHV_STATUS_PANIC = 6,
} ShvStatus;

/**
 * Working precision.
 */
typedef struct ShvContext ShvContext;

/**
 * A validated hermitian space.
 */
typedef struct ShvSpace ShvSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Owned by the library and
 * valid until the next call on the same thread.
 */
const char *shv_last_error(void);

/**
 * Releases a string returned through a `char **out` argument.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void shv_string_free(char *s);

/**
 * Context with `digits` decimal digits; `NULL` if `digits < 30`.
 */
struct ShvContext *shv_context_new(uint32_t digits);

/**
 * # Safety
 * `ctx` must come from [`shv_context_new`] and not have been freed.
 */
void shv_context_free(struct ShvContext *ctx);

/**
 * Class number `h` and unit count `w` of `Q(sqrt(-D))`.
 *
 * # Safety
 * `h` and `w` must be valid for writes.
 */
enum ShvStatus shv_field_class_number(int64_t d, uint64_t *h, uint32_t *w);

/**
 * Parses a spec string `D=<int>;n=<int>;inv=<p:+-1,...>`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum ShvStatus shv_space_parse(const char *spec, struct ShvSpace **out);

/**
 * Builds a space from `D`, `n` and `len` pairs `(primes[i], invs[i])`.
 *
 * # Safety
 * `primes` and `invs` must hold `len` entries (may be NULL when `len` is 0);
 * `out` must be valid for writes.
 */
enum ShvStatus shv_space_new(int64_t d,
                             uint32_t n,
                             const uint64_t *primes,
                             const int32_t *invs,
                             size_t len,
                             struct ShvSpace **out);

/**
 * # Safety
 * `space` must come from this library and not have been freed.
 */
void shv_space_free(struct ShvSpace *space);

/**
 * Complex volume of the Hodge bundle as an exact `"p/q"` string.
 *
 * # Safety
 * `space` must be a live handle; `out` must be valid for writes.
 */
enum ShvStatus shv_volume_hodge(const struct ShvSpace *space, char **out);

/**
 * Full volume report as JSON, without exceptional components.
 *
 * # Safety
 * `ctx` and `space` must be live handles; `out` must be valid for writes.
 */
enum ShvStatus shv_volume_json(const struct ShvContext *ctx,
                               const struct ShvSpace *space,
                               char **out);

/**
 * `B(m, 0, s0)` as an exact `"p/q"` string and its `s`-derivative as a
 * decimal string.
 *
 * # Safety
 * `ctx` and `space` must be live handles; `value` and `derivative` must be
 * valid for writes.
 */
enum ShvStatus shv_coeff_b(const struct ShvContext *ctx,
                           const struct ShvSpace *space,
                           uint64_t m,
                           char **value,
                           char **derivative);

/**
 * Borcherds weight for principal-part coefficients `c(-primes[i]) = coeffs[i]`,
 * as an exact `"p/q"` string. When `ctx` is non-NULL the constant-term route
 * is evaluated as well and must reconstruct the same rational.
 *
 * # Safety
 * `space` must be a live handle, `ctx` a live handle or NULL; `primes` and
 * `coeffs` must hold `len` entries; `out` must be valid for writes.
 */
enum ShvStatus shv_borcherds_weight(const struct ShvContext *ctx,
                                    const struct ShvSpace *space,
                                    const uint64_t *primes,
                                    const int64_t *coeffs,
                                    size_t len,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIMURA_VOL_H */
