#ifndef TAILRISK_H
#define TAILRISK_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Values other than `TR_STATUS_OK` mirror the library's
 * error kinds, plus pointer and panic failures of the boundary itself.
 */
typedef enum TrStatus {
  TR_STATUS_OK = 0,
  TR_STATUS_PARAMETER_DOMAIN = 1,
  TR_STATUS_PROBABILITY_DOMAIN = 2,
  TR_STATUS_INSUFFICIENT_DATA = 3,
  TR_STATUS_INSUFFICIENT_EXCEEDANCES = 4,
  TR_STATUS_DEGENERATE_MOMENTS = 5,
  TR_STATUS_INFINITE_MEAN = 6,
  TR_STATUS_HORIZON_TOO_SHORT = 7,
  TR_STATUS_NOT_ESTIMABLE = 8,
  TR_STATUS_EMPTY_CHAIN = 9,
  TR_STATUS_EMPTY_INPUT = 10,
  TR_STATUS_PARSE = 11,
  TR_STATUS_VALIDATION = 12,
  TR_STATUS_IO = 13,
  TR_STATUS_NULL_POINTER = 14,
  TR_STATUS_PANIC = 15,
} TrStatus;

typedef enum TrMethod {
  TR_METHOD_MOM = 0,
  TR_METHOD_PWM = 1,
  TR_METHOD_MLE = 2,
  /**
   * Posterior mode under the given prior.
   */
  TR_METHOD_MODE = 3,
  /**
   * Posterior mean from a Metropolis chain with default settings.
   */
  TR_METHOD_MEAN = 4,
} TrMethod;

typedef enum TrPrior {
  TR_PRIOR_MDI = 0,
  TR_PRIOR_JEFFREYS = 1,
  TR_PRIOR_UNIFORM = 2,
} TrPrior;

/**
 * Opaque posterior draws.
 */
typedef struct TrDraws TrDraws;

/**
 * Opaque exceedance sample.
 */
typedef struct TrSample TrSample;

typedef struct TrFit {
  double sigma;
  double gamma;
  bool converged;
  bool data_consistent;
  /**
   * NaN for the moment estimators.
   */
  double objective_value;
} TrFit;

/**
 * Chain settings. Non-positive proposal scales select the automatic
 * defaults.
 */
typedef struct TrMcmcConfig {
  size_t n_draws;
  size_t burn_in;
  size_t thinning;
  double proposal_scale_sigma;
  double proposal_scale_gamma;
  double proposal_correlation;
  uint64_t seed;
  bool adapt;
} TrMcmcConfig;

typedef struct TrRiskPoint {
  double horizon;
  double var_mean;
  double var_lo;
  double var_hi;
  double es_mean;
  double es_lo;
  double es_hi;
  double var_hist;
  double var_normal;
} TrRiskPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *tr_last_error_message(void);

/**
 * NUL-terminated library version.
 */
const char *tr_version(void);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_gpd_pdf(double mu, double sigma, double gamma, double x, double *out);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_gpd_log_pdf(double mu, double sigma, double gamma, double x, double *out);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_gpd_cdf(double mu, double sigma, double gamma, double x, double *out);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_gpd_quantile(double mu, double sigma, double gamma, double prob, double *out);

/**
 * Fills `out[0..n]` with GPD draws from the seeded stream.
 *
 * # Safety
 * `out` must be valid for writing `n` doubles.
 */
enum TrStatus tr_gpd_sample(double mu,
                            double sigma,
                            double gamma,
                            size_t n,
                            uint64_t seed,
                            double *out);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_var(double mu, double sigma, double gamma, double alpha, double *out);

/**
 * # Safety
 * `out` must be valid for writing one double.
 */
enum TrStatus tr_es(double mu, double sigma, double gamma, double alpha, double *out);

/**
 * Extracts the exceedances of `losses[0..n]` over `threshold` into a new
 * sample handle.
 *
 * # Safety
 * `losses` must point to `n` readable doubles; `out` must be writable.
 */
enum TrStatus tr_sample_new(const double *losses,
                            size_t n,
                            double threshold,
                            struct TrSample **out);

/**
 * # Safety
 * `sample` must be NULL or a handle from [`tr_sample_new`] not yet freed.
 */
void tr_sample_free(struct TrSample *sample);

/**
 * Number of exceedances, or 0 for a NULL handle.
 *
 * # Safety
 * `sample` must be NULL or a live handle.
 */
size_t tr_sample_n_exceed(const struct TrSample *sample);

/**
 * Number of observations the sample was drawn from, or 0 for NULL.
 *
 * # Safety
 * `sample` must be NULL or a live handle.
 */
size_t tr_sample_n_total(const struct TrSample *sample);

/**
 * Point fit of the excess distribution. `prior` is ignored for the
 * classical methods.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_fit(const struct TrSample *sample,
                     enum TrMethod method,
                     enum TrPrior prior,
                     struct TrFit *out);

/**
 * Default chain settings: 10000 kept draws, 2000 burn-in, no thinning,
 * automatic proposal scales, adaptation on, seed 0.
 */
struct TrMcmcConfig tr_mcmc_config_default(void);

/**
 * Runs a Metropolis chain and returns the draws as a new handle.
 *
 * # Safety
 * `sample` and `config` must be valid; `out` must be writable.
 */
enum TrStatus tr_metropolis(const struct TrSample *sample,
                            enum TrPrior prior,
                            const struct TrMcmcConfig *config,
                            struct TrDraws **out);

/**
 * # Safety
 * `draws` must be NULL or a handle from [`tr_metropolis`] not yet freed.
 */
void tr_draws_free(struct TrDraws *draws);

/**
 * # Safety
 * `draws` must be NULL or a live handle.
 */
size_t tr_draws_len(const struct TrDraws *draws);

/**
 * Post-burn-in acceptance rate, NaN for NULL.
 *
 * # Safety
 * `draws` must be NULL or a live handle.
 */
double tr_draws_acceptance_rate(const struct TrDraws *draws);

/**
 * Copies draw `index` into `sigma` and `gamma`.
 *
 * # Safety
 * `draws` must be a live handle; outputs must be writable.
 */
enum TrStatus tr_draws_get(const struct TrDraws *draws, size_t index, double *sigma, double *gamma);

/**
 * # Safety
 * `draws` must be a live handle; outputs must be writable.
 */
enum TrStatus tr_posterior_mean(const struct TrDraws *draws, double *sigma, double *gamma);

/**
 * Equal-tailed interval of `values[0..n]` at `level`.
 *
 * # Safety
 * `values` must point to `n` readable doubles; outputs must be writable.
 */
enum TrStatus tr_credible_interval(const double *values,
                                   size_t n,
                                   double level,
                                   double *lo,
                                   double *hi);

/**
 * Risk curve at `horizons[0..n_horizons]` (trading days per exceedance)
 * written to `out[0..n_horizons]`. Baselines are computed from
 * `losses[0..n_losses]` when given and are NaN otherwise.
 *
 * # Safety
 * All array pointers must be valid for their stated lengths; `out` must
 * have room for `n_horizons` points.
 */
enum TrStatus tr_risk_curve(const struct TrDraws *draws,
                            const struct TrSample *sample,
                            const double *horizons,
                            size_t n_horizons,
                            double level,
                            const double *losses,
                            size_t n_losses,
                            struct TrRiskPoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAILRISK_H */
