#ifndef SORTSUM_H
#define SORTSUM_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_PARAMETER = 2,
  SS_STATUS_OUT_OF_RANGE = 3,
  /**
   * Unsorted input, NaN, or a negative element where sums need `>= 0`.
   */
  SS_STATUS_INPUT_CONTRACT = 4,
  SS_STATUS_BUDGET_EXCEEDED = 5,
  SS_STATUS_INTERNAL = 6,
  SS_STATUS_PANIC = 7,
} SsStatus;

/**
 * Opaque list handle.
 */
typedef struct SsView SsView;

/**
 * Returns `X[index]` for `1 <= index <= len`; must be nondecreasing in
 * `index` and must not unwind.
 */
typedef double (*SsValueFn)(uint64_t index, void *user_data);

/**
 * `[lo, hi]`, or empty when `is_empty` is set (then `lo = hi = 0`).
 */
typedef struct SsRegion {
  uint64_t lo;
  uint64_t hi;
  bool is_empty;
} SsRegion;

typedef struct SsSumResult {
  double estimate;
  /**
   * Number of regions peeled.
   */
  uint64_t cycles;
  /**
   * Queries made by this call.
   */
  uint64_t queries;
  /**
   * Internal region accuracy used.
   */
  double delta;
} SsSumResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ss_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *ss_version(void);

/**
 * Copies `len` values into a new view after checking they are
 * nondecreasing and free of NaN.
 *
 * # Safety
 * `values` must point to `len` readable doubles (or be null when `len` is
 * 0); `out` must be writable.
 */
enum SsStatus ss_view_from_array(const double *values, uint64_t len, struct SsView **out);

/**
 * Creates a view over `callback(1..=len, user_data)` without storing the
 * values. Order is not checked.
 *
 * # Safety
 * `callback` must be safe to call with `user_data` for the lifetime of the
 * view; `out` must be writable.
 */
enum SsStatus ss_view_from_fn(uint64_t len,
                              SsValueFn callback,
                              void *user_data,
                              struct SsView **out);

/**
 * Releases a view; null is ignored.
 *
 * # Safety
 * `view` must come from this library and not be used afterwards.
 */
void ss_view_free(struct SsView *view);

/**
 * Length of the view, 0 for null.
 *
 * # Safety
 * `view` must be null or a live handle.
 */
uint64_t ss_view_len(const struct SsView *view);

/**
 * Queries made through the view since creation or the last reset.
 *
 * # Safety
 * `view` must be null or a live handle.
 */
uint64_t ss_view_queries(const struct SsView *view);

/**
 * # Safety
 * `view` must be null or a live handle.
 */
void ss_view_reset_queries(struct SsView *view);

/**
 * `(1+delta)`-approximate `b`-region of `X[1..n]`.
 *
 * # Safety
 * `view` must be a live handle and `out` writable.
 */
enum SsStatus ss_approximate_region(struct SsView *view,
                                    double b,
                                    double delta,
                                    uint64_t n,
                                    struct SsRegion *out);

/**
 * `(1+epsilon)`-approximate sum of `X[1..n]`.
 *
 * # Safety
 * `view` must be a live handle and `out` writable.
 */
enum SsStatus ss_approximate_sum(struct SsView *view,
                                 double epsilon,
                                 uint64_t n,
                                 struct SsSumResult *out);

/**
 * Exact `X[1] + ... + X[n]` with `n` queries.
 *
 * # Safety
 * `view` must be a live handle and `out` writable.
 */
enum SsStatus ss_exact_sum(struct SsView *view, uint64_t n, double *out);

/**
 * Checks that `region` is a `(1+delta)`-approximate `b`-region of
 * `X[1..n]` in `O(log n)` queries; writes the verdict to `passed`.
 *
 * # Safety
 * `view` must be a live handle, `region` readable and `passed` writable.
 */
enum SsStatus ss_verify_region(struct SsView *view,
                               double b,
                               double delta,
                               const struct SsRegion *region,
                               uint64_t n,
                               bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SORTSUM_H */
