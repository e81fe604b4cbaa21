#ifndef SEQELIM_H
#define SEQELIM_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SeqelimStatus {
  SEQELIM_STATUS_OK = 0,
  SEQELIM_STATUS_NULL_POINTER = 1,
  SEQELIM_STATUS_INVALID_ARGUMENT = 2,
  SEQELIM_STATUS_BUDGET_TOO_SMALL = 3,
  SEQELIM_STATUS_ENUMERATION_LIMIT = 4,
  SEQELIM_STATUS_INVALID_UTF8 = 5,
  SEQELIM_STATUS_PANIC = 6,
} SeqelimStatus;

/**
 * Opaque bandit instance.
 */
typedef struct SeqelimEnv SeqelimEnv;

typedef struct SeqelimInterval {
  double lo;
  double hi;
  bool hi_closed;
} SeqelimInterval;

typedef struct SeqelimAdvice {
  /**
   * 0: few competitive arms, 1: intermediate, 2: many.
   */
  int32_t condition;
  struct SeqelimInterval recommended;
  struct SeqelimInterval interpolated;
  double suggested;
} SeqelimAdvice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *seqelim_last_error(void);

/**
 * Bernoulli instance with `len` means in `[0, 1]` and a unique best arm.
 *
 * # Safety
 * `means` must point to `len` readable doubles; `out` must be writable.
 */
enum SeqelimStatus seqelim_env_new(const double *means, size_t len, struct SeqelimEnv **out);

/**
 * Benchmark setup by name (`"1"`..`"6"`, `"setup4"`, `"geo7"`) and arm count.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum SeqelimStatus seqelim_env_from_setup(const char *name,
                                          size_t num_arms,
                                          struct SeqelimEnv **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `env` must come from a constructor here and not be freed twice.
 */
void seqelim_env_free(struct SeqelimEnv *env);

/**
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_env_num_arms(const struct SeqelimEnv *env, size_t *out);

/**
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_env_best_arm(const struct SeqelimEnv *env, size_t *out);

/**
 * `H1 = sum 1/Delta_i^2`.
 *
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_h1(const struct SeqelimEnv *env, double *out);

/**
 * `H2 = max_i i / Delta_(i)^2`.
 *
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_h2(const struct SeqelimEnv *env, double *out);

/**
 * `H(p) = max_i i^p / Delta_(i)^2`.
 *
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_h_p(const struct SeqelimEnv *env, double p, double *out);

/**
 * `C_p = 2^-p + sum_{r=2}^{K} r^-p`. NaN for `K < 2` or `p <= 0`.
 */
double seqelim_c_p(size_t num_arms, double p);

/**
 * `ceil(H1)`, the budget used by the benchmarks.
 *
 * # Safety
 * `env` must be a live handle; `out` must be writable.
 */
enum SeqelimStatus seqelim_default_budget(const struct SeqelimEnv *env, uint64_t *out);

/**
 * One run of `alg` (e.g. `"nseqel:p=1.7"`, `"seqhalv"`, `"ucbe:c=2"`);
 * writes the recommended arm.
 *
 * # Safety
 * `env` must be a live handle, `alg` NUL-terminated, `out` writable.
 */
enum SeqelimStatus seqelim_run(const struct SeqelimEnv *env,
                               const char *alg,
                               uint64_t budget,
                               uint64_t seed,
                               size_t *out);

/**
 * Misidentification frequency over `runs` seeded runs.
 *
 * # Safety
 * `env` must be a live handle, `alg` NUL-terminated, `out` writable.
 */
enum SeqelimStatus seqelim_misid_frequency(const struct SeqelimEnv *env,
                                           const char *alg,
                                           uint64_t budget,
                                           uint64_t runs,
                                           uint64_t seed,
                                           double *out);

/**
 * Exact misidentification probability (small instances only).
 *
 * # Safety
 * `env` must be a live handle, `alg` NUL-terminated, `out` writable.
 */
enum SeqelimStatus seqelim_exact_misid(const struct SeqelimEnv *env,
                                       const char *alg,
                                       uint64_t budget,
                                       double *out);

/**
 * Range of `p` for `num_arms` arms with `competitive` competitive ones.
 *
 * # Safety
 * `out` must be writable.
 */
enum SeqelimStatus seqelim_advise_p(size_t num_arms, double competitive, struct SeqelimAdvice *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEQELIM_H */
