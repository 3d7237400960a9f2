#ifndef DUALITY_H
#define DUALITY_H

/* Generated by cbindgen from the duality-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum DualityStatus {
  // Success.
  DUALITY_STATUS_OK = 0,
  // A parameter was outside its documented domain.
  DUALITY_STATUS_INVALID_ARGUMENT = 1,
  // A required pointer was null.
  DUALITY_STATUS_NULL_POINTER = 2,
  // The computation failed internally.
  DUALITY_STATUS_COMPUTE_ERROR = 3,
  // The handle has not been run yet.
  DUALITY_STATUS_NOT_RUN = 4,
} DualityStatus;

// Which-way measurement strategy.
typedef enum DualityStrategy {
  DUALITY_STRATEGY_UQSD = 0,
  DUALITY_STRATEGY_MED = 1,
} DualityStrategy;

// Opaque Monte Carlo experiment: one configuration, one strategy, a photon
// budget and a master seed.
typedef struct DualityExperiment DualityExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Path priors p1 = cos²2θ_a and p2 = sin²2θ_a from the symmetry
// parameter tan2θ_a ∈ [0, 1].
//
// # Safety
// `p1` and `p2` must be valid writable pointers.
enum DualityStatus duality_split_probs(double tan2a, double *p1, double *p2);

// Ideal fringe visibility V = 2√(p1·p2)·sin2θ_n.
//
// # Safety
// `out` must be a valid writable pointer.
enum DualityStatus duality_visibility(double tan2a, double sin2n, double *out);

// Optimal unambiguous-discrimination success probability D_u.
//
// # Safety
// `out` must be a valid writable pointer.
enum DualityStatus duality_uqsd_bound(double tan2a, double sin2n, double *out);

// Helstrom bound: maximum correct-guess probability P_r.
//
// # Safety
// `out` must be a valid writable pointer.
enum DualityStatus duality_helstrom(double tan2a, double sin2n, double *out);

// Minimum-error distinguishability D_m = 2·P_r − 1.
//
// # Safety
// `out` must be a valid writable pointer.
enum DualityStatus duality_dm(double tan2a, double sin2n, double *out);

// Exact mutual information (bits) gained by the strategy's optimal
// measurement.
//
// # Safety
// `out` must be a valid writable pointer.
enum DualityStatus duality_mutual_information(double tan2a,
                                              double sin2n,
                                              enum DualityStrategy strategy,
                                              double *out);

// Create an experiment handle. Returns null when a parameter is outside
// its domain. Free with [`duality_experiment_free`].
struct DualityExperiment *duality_experiment_new(double tan2a,
                                                 double sin2n,
                                                 enum DualityStrategy strategy,
                                                 double photons,
                                                 size_t phases,
                                                 size_t repeats,
                                                 double loop_visibility,
                                                 uint64_t seed);

// Sample counts and compute the estimators. Deterministic for a given
// handle configuration and seed.
//
// # Safety
// `handle` must come from [`duality_experiment_new`] and not be freed.
enum DualityStatus duality_experiment_run(struct DualityExperiment *handle);

// Estimated fringe visibility with its one-standard-deviation error.
//
// # Safety
// `handle` must be a live experiment; `value`/`sigma` writable.
enum DualityStatus duality_experiment_visibility(const struct DualityExperiment *handle,
                                                 double *value,
                                                 double *sigma);

// Estimated distinguishability (D_u under UQSD, D_m under MED).
//
// # Safety
// `handle` must be a live experiment; `value`/`sigma` writable.
enum DualityStatus duality_experiment_distinguishability(const struct DualityExperiment *handle,
                                                         double *value,
                                                         double *sigma);

// Estimated duality sum: V + D_u under UQSD, V² + D_m² under MED.
//
// # Safety
// `handle` must be a live experiment; `value`/`sigma` writable.
enum DualityStatus duality_experiment_duality_sum(const struct DualityExperiment *handle,
                                                  double *value,
                                                  double *sigma);

// Release a handle. Null is accepted and ignored.
//
// # Safety
// `handle` must come from [`duality_experiment_new`] and must not be used
// afterwards.
void duality_experiment_free(struct DualityExperiment *handle);

// Library version as a static NUL-terminated string; do not free.
const char *duality_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DUALITY_H */
