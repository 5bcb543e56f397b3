#ifndef KNOTVOL_H
#define KNOTVOL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of every fallible call.
 */
typedef enum KvStatus {
  KV_STATUS_OK = 0,
  KV_STATUS_NULL_POINTER = 1,
  KV_STATUS_DOMAIN = 2,
  KV_STATUS_NUMERIC = 3,
  KV_STATUS_BRANCH = 4,
  KV_STATUS_SELECTION = 5,
  KV_STATUS_USAGE = 6,
  KV_STATUS_IO = 7,
  KV_STATUS_PANIC = 8,
} KvStatus;

/**
 * Knot family selector for [`KvKnot`].
 */
typedef enum KvFamily {
  KV_FAMILY_BORROMEAN = 0,
  KV_FAMILY_B1 = 1,
  KV_FAMILY_B11 = 2,
  KV_FAMILY_WHITEHEAD = 3,
  KV_FAMILY_DOUBLE_TWIST = 4,
} KvFamily;

/**
 * Precomputed tables for one N.
 */
typedef struct KvContext KvContext;

/**
 * One evaluated J_{N−1}(K).
 */
typedef struct KvJones KvJones;

/**
 * A holonomy representation with its fixed points.
 */
typedef struct KvRep KvRep;

/**
 * A knot: `p` is used by Whitehead and DoubleTwist, `r` by DoubleTwist.
 */
typedef struct KvKnot {
  enum KvFamily family;
  int64_t p;
  int64_t r;
} KvKnot;

typedef struct KvComplex {
  double re;
  double im;
} KvComplex;

/**
 * Vol + i·CS with CS in [0, π²).
 */
typedef struct KvComplexVolume {
  double vol;
  double cs;
} KvComplexVolume;

/**
 * Saddle point; `beta0` is ½ for the one-variable Whitehead potential.
 */
typedef struct KvSaddle {
  struct KvComplex alpha0;
  struct KvComplex beta0;
  struct KvComplex u;
  struct KvComplex v;
  double volume;
} KvSaddle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Free with
 * [`kv_string_free`].
 */
char *kv_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void kv_string_free(char *s);

/**
 * Create the context for odd N ≥ 3.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KvStatus kv_context_new(size_t n, struct KvContext **out);

/**
 * # Safety
 * `ctx` must come from [`kv_context_new`] and not be freed twice.
 */
void kv_context_free(struct KvContext *ctx);

/**
 * Evaluate J_{N−1}(K). `precision_bits`: 0 automatic, 53 plain double,
 * otherwise the MPFR precision of the twisted sums.
 *
 * # Safety
 * `ctx` must be a live context and `out` a valid pointer.
 */
enum KvStatus kv_jones(const struct KvContext *ctx,
                       struct KvKnot knot,
                       uint32_t precision_bits,
                       struct KvJones **out);

/**
 * log J on the branch recorded by the evaluator.
 *
 * # Safety
 * `v` must be a live handle and `out` a valid pointer.
 */
enum KvStatus kv_jones_log(const struct KvJones *v, struct KvComplex *out);

/**
 * J itself (may overflow to infinity for large N; prefer [`kv_jones_log`]).
 *
 * # Safety
 * `v` must be a live handle and `out` a valid pointer.
 */
enum KvStatus kv_jones_value(const struct KvJones *v, struct KvComplex *out);

/**
 * Mantissa bits used for the sum.
 *
 * # Safety
 * `v` must be a live handle or null (returns 0).
 */
uint32_t kv_jones_precision_bits(const struct KvJones *v);

/**
 * # Safety
 * `v` must come from [`kv_jones`] and not be freed twice.
 */
void kv_jones_free(struct KvJones *v);

/**
 * Complex volume of a Borromean-family link, W_p or D_{p,r}.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KvStatus kv_complex_volume(struct KvKnot knot, struct KvComplexVolume *out);

/**
 * Geometric saddle point of the W_p or D_{p,r} potential.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KvStatus kv_saddle(struct KvKnot knot, struct KvSaddle *out);

/**
 * Build the geometric representation of K.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KvStatus kv_rep_new(struct KvKnot knot, struct KvRep **out);

/**
 * Fixed point by label. `*is_infinite` is set when the point is ∞ (then
 * `out` is left untouched).
 *
 * # Safety
 * `rep` must be live, `label` a NUL-terminated string, `out` and
 * `is_infinite` valid pointers.
 */
enum KvStatus kv_rep_fixed_point(const struct KvRep *rep,
                                 const char *label,
                                 struct KvComplex *out,
                                 bool *is_infinite);

/**
 * Domain JSON (fixed points, axes, relation residuals). Free with
 * [`kv_string_free`]; null on failure.
 *
 * # Safety
 * `rep` must be a live handle.
 */
char *kv_rep_to_json(const struct KvRep *rep);

/**
 * # Safety
 * `rep` must come from [`kv_rep_new`] and not be freed twice.
 */
void kv_rep_free(struct KvRep *rep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNOTVOL_H */
