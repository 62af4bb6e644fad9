#ifndef TAS_CAPACITY_H
#define TAS_CAPACITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TasStatus {
  TAS_STATUS_OK = 0,
  TAS_STATUS_NULL_POINTER = 1,
  TAS_STATUS_INVALID_CONFIG = 2,
  TAS_STATUS_NUMERIC = 3,
  TAS_STATUS_DOMAIN = 4,
  TAS_STATUS_SOLVER = 5,
  TAS_STATUS_INVALID_ARGUMENT = 6,
  TAS_STATUS_PANIC = 7,
} TasStatus;

typedef enum TasOutageConvention {
  /**
   * `R` is the `1 − p_out` quantile.
   */
  TAS_OUTAGE_CONVENTION_PAPER = 0,
  /**
   * `R` is the `p_out` quantile.
   */
  TAS_OUTAGE_CONVENTION_STANDARD = 1,
} TasOutageConvention;

/**
 * Validated system configuration.
 */
typedef struct TasConfig TasConfig;

/**
 * Monte Carlo trial source bound to one configuration.
 */
typedef struct TasSimulator TasSimulator;

typedef struct TasTrimmedSumStats {
  double u;
  double eta_t;
  double sigma_t_sq;
  double xi_t;
} TasTrimmedSumStats;

typedef struct TasGaussianApprox {
  double eta;
  double sigma_sq;
  double xi;
} TasGaussianApprox;

/**
 * One channel realization. `geometric_mi` is NaN when `geometric_valid` is 0.
 */
typedef struct TasTrialRecord {
  double exact_mi;
  double geometric_mi;
  uint8_t geometric_valid;
  double jensen_bound;
  double trace_j;
} TasTrialRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tas_version(void);

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *tas_last_error_message(void);

/**
 * Validates and allocates a configuration. The SNR is given in dB.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum TasStatus tas_config_new(size_t n_t,
                              size_t n_r,
                              size_t l_t,
                              double rho_db,
                              uint64_t seed,
                              struct TasConfig **out);

/**
 * Parses a JSON object with fields `n_t`, `n_r`, `l_t`, `rho_db` and an optional `seed`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable storage for one handle.
 */
enum TasStatus tas_config_from_json(const char *json, struct TasConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from `tas_config_new`/`tas_config_from_json`
 * that has not been freed.
 */
void tas_config_free(struct TasConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live config handle and `out` writable.
 */
enum TasStatus tas_trimmed_sum_stats(const struct TasConfig *cfg, struct TasTrimmedSumStats *out);

/**
 * Closed-form Gaussian approximation `N(η, σ²)` of the mutual information.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` writable.
 */
enum TasStatus tas_gaussian_approx(const struct TasConfig *cfg, struct TasGaussianApprox *out);

/**
 * Ergodic capacity in bits per channel use.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` writable.
 */
enum TasStatus tas_ergodic_capacity(const struct TasConfig *cfg, double *out);

/**
 * Outage capacity for `0 < p_out < 1`.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` writable.
 */
enum TasStatus tas_outage_capacity(const struct TasConfig *cfg,
                                   double p_out,
                                   enum TasOutageConvention convention,
                                   double *out);

/**
 * Creates a simulator over a copy of `cfg`; the config handle may be freed afterwards.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` writable storage for one handle.
 */
enum TasStatus tas_simulator_new(const struct TasConfig *cfg, struct TasSimulator **out);

/**
 * # Safety
 * `sim` must be null or a live simulator handle.
 */
void tas_simulator_free(struct TasSimulator *sim);

/**
 * Evaluates trial `trial`. The result depends only on the seed and the
 * index, so trials may be requested in any order.
 *
 * # Safety
 * `sim` must be a live simulator handle and `out` writable.
 */
enum TasStatus tas_simulator_run_trial(const struct TasSimulator *sim,
                                       uint64_t trial,
                                       struct TasTrialRecord *out);

/**
 * Fills `out[0..count]` with the next `count` trials and advances the cursor.
 *
 * # Safety
 * `sim` must be a live simulator handle and `out` must point to `count`
 * writable records (it may be null when `count` is 0).
 */
enum TasStatus tas_simulator_next(struct TasSimulator *sim,
                                  struct TasTrialRecord *out,
                                  size_t count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAS_CAPACITY_H */
