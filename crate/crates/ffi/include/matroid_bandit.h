#ifndef MATROID_BANDIT_H
#define MATROID_BANDIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbAlgo {
  MB_ALGO_CUCB = 0,
  MB_ALGO_FASTER_CUCB = 1,
  MB_ALGO_LAZY_HEAP = 2,
} MbAlgo;

/**
 * Result codes.
 */
typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_INVALID_INPUT = 1,
  MB_STATUS_CONTRACT = 2,
  MB_STATUS_REFUSED = 3,
  MB_STATUS_DEGENERATE = 4,
  MB_STATUS_INTERNAL = 5,
  MB_STATUS_IO = 6,
  MB_STATUS_NULL_POINTER = 7,
  MB_STATUS_BUFFER_TOO_SMALL = 8,
  MB_STATUS_PANIC = 9,
} MbStatus;

/**
 * Opaque approximate-index handle.
 */
typedef struct MbIndex MbIndex;

/**
 * Opaque matroid handle.
 */
typedef struct MbMatroid MbMatroid;

/**
 * Feature bounds `[alpha_lb, alpha_ub] x [beta_lb, beta_ub]`.
 */
typedef struct MbBounds {
  double alpha_lb;
  double alpha_ub;
  double beta_lb;
  double beta_ub;
} MbBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *mb_last_error_message(void);

/**
 * Parses a matroid from its text form, e.g. `uniform 8 3`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MbStatus mb_matroid_parse(const char *text, struct MbMatroid **out);

/**
 * # Safety
 * `m` must come from [`mb_matroid_parse`] and not be used afterwards.
 */
void mb_matroid_free(struct MbMatroid *m);

/**
 * Ground-set size, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t mb_matroid_ground_size(const struct MbMatroid *m);

/**
 * Rank, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t mb_matroid_rank(const struct MbMatroid *m);

/**
 * Maximum-weight basis. `out` receives the members in ascending order;
 * `out_len` is set even when the buffer is too small.
 *
 * # Safety
 * `weights` must hold `len` values and `out` `cap` slots.
 */
enum MbStatus mb_greedy(const struct MbMatroid *m,
                        const double *weights,
                        size_t len,
                        size_t *out,
                        size_t cap,
                        size_t *out_len);

/**
 * Builds an approximate index over arm features `(alpha[k], beta[k])`,
 * answering queries with nonnegative coordinates.
 *
 * # Safety
 * `alpha` and `beta` must hold `len` values; `out` must be valid.
 */
enum MbStatus mb_index_new(const struct MbMatroid *m,
                           struct MbBounds bounds,
                           const double *alpha,
                           const double *beta,
                           size_t len,
                           double epsilon,
                           struct MbIndex **out);

/**
 * Approximate maximum-weight base for the query `(q1, q2)`.
 *
 * # Safety
 * `idx` must be live; `out` must hold `cap` slots.
 */
enum MbStatus mb_index_find_base(struct MbIndex *idx,
                                 double q1,
                                 double q2,
                                 size_t *out,
                                 size_t cap,
                                 size_t *out_len);

/**
 * Replaces arm `arm`'s feature.
 *
 * # Safety
 * `idx` must be live.
 */
enum MbStatus mb_index_update_feature(struct MbIndex *idx, size_t arm, double alpha, double beta);

/**
 * Number of hitting-set cells, or 0 for a null handle.
 *
 * # Safety
 * `idx` must be null or live.
 */
size_t mb_index_hitting_set_size(const struct MbIndex *idx);

/**
 * # Safety
 * `idx` must come from [`mb_index_new`] and not be used afterwards.
 */
void mb_index_free(struct MbIndex *idx);

/**
 * Simulates two-point arms with the given means on `[a, b]` for `horizon`
 * rounds. Writes the final pseudo-regret to `out_final_regret`; if
 * `out_cum_regret` is non-null it must hold `horizon` values and receives
 * the cumulative regret per round.
 *
 * # Safety
 * `means` must hold `len` values; output pointers as described.
 */
enum MbStatus mb_run_experiment(const struct MbMatroid *m,
                                enum MbAlgo algo,
                                uint64_t horizon,
                                double a,
                                double b,
                                const double *means,
                                size_t len,
                                uint64_t seed,
                                double *out_final_regret,
                                double *out_cum_regret);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATROID_BANDIT_H */
