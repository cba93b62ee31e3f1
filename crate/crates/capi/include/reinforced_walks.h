/* C ABI for the reinforced-walks simulation and verification library.
 *
 * Conventions: opaque handles for owned objects, integer status codes for
 * fallible calls, and a thread-local last-error message retrievable with
 * rw_last_error_message(). Output parameters are written only on RW_OK.
 *
 * This header is kept in sync with crates/capi/src/lib.rs; it can be
 * regenerated with `cbindgen --config cbindgen.toml --crate
 * reinforced-walks-capi --output include/reinforced_walks.h`.
 */

#ifndef REINFORCED_WALKS_H
#define REINFORCED_WALKS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible calls.
 */
typedef enum RwStatus {
  RW_OK = 0,
  RW_ERR_INVALID_ARGUMENT = 1,
  RW_ERR_NULL_POINTER = 2,
  RW_ERR_UNSUPPORTED = 3,
  RW_ERR_INTERNAL = 4,
} RwStatus;

/**
 * Walk sign selector.
 */
typedef enum RwSign {
  RW_SIGN_POSITIVE = 0,
  RW_SIGN_NEGATIVE = 1,
} RwSign;

/**
 * Truncation rule selector (t_n = infinity, sqrt(n), n).
 */
typedef enum RwTruncation {
  RW_TRUNCATION_NONE = 0,
  RW_TRUNCATION_SQRT = 1,
  RW_TRUNCATION_LINEAR = 2,
} RwTruncation;

/**
 * Limit-process selector for covariance queries.
 */
typedef enum RwProcess {
  RW_PROCESS_STANDARD_BM = 0,
  RW_PROCESS_NOISE_REINFORCED = 1,
  RW_PROCESS_COUNTERBALANCED = 2,
} RwProcess;

/**
 * Opaque handle to a step distribution.
 */
typedef struct RwDistribution RwDistribution;

#ifdef __cplusplus
extern "C" {
#endif

/**
 * Version string of the library; the pointer is static.
 */
const char *rw_version(void);

/**
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `cap` bytes) and returns the full message length.
 */
size_t rw_last_error_message(char *buf, size_t cap);

/**
 * Rademacher steps (+1 or -1 with probability 1/2 each). Never fails.
 */
struct RwDistribution *rw_distribution_rademacher(void);

/**
 * Gaussian steps; NULL on invalid parameters (see rw_last_error_message).
 */
struct RwDistribution *rw_distribution_gaussian(double mean, double sd);

/**
 * Two-point law taking value `a` with probability `prob_a`, else `b`.
 */
struct RwDistribution *rw_distribution_two_point(double a, double b, double prob_a);

/**
 * Degenerate law at `c`.
 */
struct RwDistribution *rw_distribution_constant(double c);

/**
 * Pareto law with survival (scale/x)^alpha, x >= scale; requires alpha > 1.
 */
struct RwDistribution *rw_distribution_pareto(double alpha, double scale);

/**
 * Releases a distribution handle; NULL is a no-op.
 */
void rw_distribution_free(struct RwDistribution *dist);

/**
 * E(X) of the step law.
 */
enum RwStatus rw_distribution_mean(const struct RwDistribution *dist, double *out);

/**
 * E(X^2) of the step law; +infinity when the second moment diverges.
 */
enum RwStatus rw_distribution_second_moment(const struct RwDistribution *dist, double *out);

/**
 * Simulates one walk on stream (seed, stream_id) and writes the final
 * value.
 */
enum RwStatus rw_simulate_final(const struct RwDistribution *dist,
                                double p,
                                enum RwSign sign,
                                enum RwTruncation truncation,
                                uint64_t horizon,
                                uint64_t seed,
                                uint64_t stream_id,
                                double *out_final);

/**
 * Simulates one walk and writes its value at each checkpoint (strictly
 * increasing indices, the last one at most `horizon`).
 */
enum RwStatus rw_simulate_checkpoints(const struct RwDistribution *dist,
                                      double p,
                                      enum RwSign sign,
                                      enum RwTruncation truncation,
                                      uint64_t horizon,
                                      uint64_t seed,
                                      uint64_t stream_id,
                                      const uint64_t *checkpoints,
                                      size_t n_checkpoints,
                                      double *out_values);

/**
 * Writes the exact-recursion E S*(n) and/or Var S*(n) for n = 1..=n_max
 * into caller arrays of length n_max; either array pointer may be NULL to
 * skip it.
 */
enum RwStatus rw_moment_profile(const struct RwDistribution *dist,
                                double p,
                                enum RwSign sign,
                                enum RwTruncation truncation,
                                uint64_t n_max,
                                double *out_mean,
                                double *out_var);

/**
 * E N_j(n), the expected occupancy of the tree rooted at step j.
 */
enum RwStatus rw_expected_occupancy(double p, uint64_t j, uint64_t n, double *out);

/**
 * E Delta_j(n), the expected signed occupancy.
 */
enum RwStatus rw_expected_delta(double p, uint64_t j, uint64_t n, double *out);

/**
 * E Delta_j(n)^2 by the exact recursion.
 */
enum RwStatus rw_expected_delta_squared(double p, uint64_t j, uint64_t n, double *out);

/**
 * The gamma-ratio scaling a_n = Gamma(n) Gamma(1+x) / Gamma(n+x).
 */
enum RwStatus rw_gamma_ratio(double x, uint64_t n, double *out);

/**
 * Closed-form covariance of the limiting Gaussian process at times (s, t).
 */
enum RwStatus rw_limit_covariance(enum RwProcess process, double p, double s, double t, double *out);

/**
 * The law-of-iterated-logarithm constant for the given walk: the positive
 * walk uses the diffusive constant for p < 1/2 and the critical one at
 * p = 1/2; the negative walk is defined for p in [0, 1).
 */
enum RwStatus rw_lil_constant(enum RwSign sign,
                              double p,
                              const struct RwDistribution *dist,
                              double *out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* REINFORCED_WALKS_H */
