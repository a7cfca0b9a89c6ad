#ifndef EBMONO_H
#define EBMONO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum EbStatus {
  EB_STATUS_OK = 0,
  EB_STATUS_NULL_POINTER = 1,
  EB_STATUS_INVALID_ARGUMENT = 2,
  EB_STATUS_DOMAIN_ERROR = 3,
  EB_STATUS_INFEASIBLE = 4,
  EB_STATUS_BUFFER_TOO_SMALL = 5,
  EB_STATUS_IO_ERROR = 6,
  EB_STATUS_PARSE_ERROR = 7,
  EB_STATUS_PANIC = 8,
} EbStatus;

// Retained posterior draws.
typedef struct EbDraws EbDraws;

// A finite mixture of uniforms.
typedef struct EbMixture EbMixture;

// Observations, sorted ascending.
typedef struct EbSample EbSample;

// Chain lengths and seed, mirroring the Rust `ChainConfig`.
typedef struct EbChainConfig {
  uint64_t burn_in;
  uint64_t iterations;
  uint64_t thin;
  uint64_t seed;
} EbChainConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL.
// The pointer stays valid until the next call into this library on the same thread.
const char *eb_last_error_message(void);

// The library version as a static NUL-terminated string.
const char *eb_version(void);

// # Safety
// `values` must point to `n` readable doubles; `out` must be writable.
enum EbStatus eb_sample_new(const double *values, uintptr_t n, struct EbSample **out);

// Read a data file with the same rules as the command-line tool.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
enum EbStatus eb_sample_from_file(const char *path, struct EbSample **out);

// Number of observations, or 0 for NULL.
//
// # Safety
// `sample` must be NULL or a live handle.
uintptr_t eb_sample_len(const struct EbSample *sample);

// Copy the sorted observations into `buf` (capacity `cap`).
//
// # Safety
// `sample` must be a live handle; `buf` must have room for `cap` doubles.
enum EbStatus eb_sample_values(const struct EbSample *sample, double *buf, uintptr_t cap);

// # Safety
// `sample` must be NULL or a handle from this library, not freed before.
void eb_sample_free(struct EbSample *sample);

// Canonical mixture from `s` weights and locations.
//
// # Safety
// `weights` and `locations` must each point to `s` doubles; `out` must be writable.
enum EbStatus eb_mixture_new(const double *weights,
                             const double *locations,
                             uintptr_t s,
                             struct EbMixture **out);

// Number of components, or 0 for NULL.
//
// # Safety
// `mixture` must be NULL or a live handle.
uintptr_t eb_mixture_len(const struct EbMixture *mixture);

// # Safety
// `mixture` must be a live handle; `buf` must have room for `cap` doubles.
enum EbStatus eb_mixture_weights(const struct EbMixture *mixture, double *buf, uintptr_t cap);

// # Safety
// `mixture` must be a live handle; `buf` must have room for `cap` doubles.
enum EbStatus eb_mixture_locations(const struct EbMixture *mixture, double *buf, uintptr_t cap);

// Density at `x > 0`.
//
// # Safety
// `mixture` must be a live handle; `out` must be writable.
enum EbStatus eb_mixture_density(const struct EbMixture *mixture, double x, double *out);

// Distribution function at `x ≥ 0`.
//
// # Safety
// `mixture` must be a live handle; `out` must be writable.
enum EbStatus eb_mixture_cdf(const struct EbMixture *mixture, double x, double *out);

// Log-likelihood of the sample; `-INFINITY` when an observation is outside the support.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum EbStatus eb_mixture_log_likelihood(const struct EbMixture *mixture,
                                        const struct EbSample *sample,
                                        double *out);

// # Safety
// `mixture` must be NULL or a handle from this library, not freed before.
void eb_mixture_free(struct EbMixture *mixture);

// The Grenander estimator of the sample as a mixture of uniforms.
//
// # Safety
// `sample` must be a live handle; `out` must be writable.
enum EbStatus eb_grenander_fit(const struct EbSample *sample, struct EbMixture **out);

// Prior constants for sample size `n` under the schedule
// `c = c_mult · n^{5/3} / (ln n)^{2/3}`, `δ = ln n / delta_div`.
//
// # Safety
// `c` and `delta` must be writable.
enum EbStatus eb_hyperparams(uintptr_t n,
                             double c_mult,
                             double delta_div,
                             double *c,
                             double *delta);

// Default chain: 1000 burn-in sweeps, 2000 retained iterations, no thinning, seed 0.
struct EbChainConfig eb_chain_config_default(void);

// Full pipeline: Grenander center, prior from the schedule, Gibbs chain.
//
// # Safety
// `sample` must be a live handle, `config` readable and `out` writable.
enum EbStatus eb_posterior_fit(const struct EbSample *sample,
                               const struct EbChainConfig *config,
                               double c_mult,
                               double delta_div,
                               struct EbDraws **out);

// Number of retained draws, or 0 for NULL.
//
// # Safety
// `draws` must be NULL or a live handle.
uintptr_t eb_draws_len(const struct EbDraws *draws);

// Copy of draw `index` as a new mixture handle (components in label order).
//
// # Safety
// `draws` must be a live handle; `out` must be writable.
enum EbStatus eb_draws_get(const struct EbDraws *draws, uintptr_t index, struct EbMixture **out);

// Equal-tailed credible interval for `f(x)`.
//
// # Safety
// `draws` must be a live handle; `lower` and `upper` must be writable.
enum EbStatus eb_draws_interval(const struct EbDraws *draws,
                                double x,
                                double level,
                                double *lower,
                                double *upper);

// Pointwise mean and credible band on `grid` (length `len`); each output holds `len` doubles.
//
// # Safety
// `grid`, `mean`, `lower` and `upper` must each point to `len` doubles.
enum EbStatus eb_draws_band(const struct EbDraws *draws,
                            const double *grid,
                            uintptr_t len,
                            double level,
                            double *mean,
                            double *lower,
                            double *upper);

// Posterior mean density on `grid`.
//
// # Safety
// `grid` and `out` must each point to `len` doubles.
enum EbStatus eb_draws_mean_density(const struct EbDraws *draws,
                                    const double *grid,
                                    uintptr_t len,
                                    double *out);

// # Safety
// `draws` must be NULL or a handle from this library, not freed before.
void eb_draws_free(struct EbDraws *draws);

// Half-normalized L1 distance `½ ∫ |f − g|`.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum EbStatus eb_l1_distance(const struct EbMixture *a, const struct EbMixture *b, double *out);

// Hellinger distance `sqrt(1 − ∫ sqrt(f g))`.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum EbStatus eb_hellinger_distance(const struct EbMixture *a,
                                    const struct EbMixture *b,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EBMONO_H */
