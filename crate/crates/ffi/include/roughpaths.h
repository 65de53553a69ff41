#ifndef ROUGHPATHS_H
#define ROUGHPATHS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpModel {
  RP_MODEL_BM = 0,
  RP_MODEL_FBM = 1,
} RpModel;

typedef enum RpScheme {
  RP_SCHEME_WONG_ZAKAI = 0,
  RP_SCHEME_SIMPLIFIED_EULER = 1,
  RP_SCHEME_EULER = 2,
} RpScheme;

// Result codes shared by all functions.
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_ARGUMENT = 2,
  RP_STATUS_SINGULAR = 3,
  RP_STATUS_NUMERICAL = 4,
  RP_STATUS_DIVERGENCE = 5,
  RP_STATUS_UNSUPPORTED = 6,
  RP_STATUS_PARSE = 7,
  RP_STATUS_IO = 8,
  RP_STATUS_BUFFER_TOO_SMALL = 9,
  RP_STATUS_PANIC = 10,
} RpStatus;

// Exact Gaussian path sampler on a uniform grid.
typedef struct RpSampler RpSampler;

// Element of the truncated tensor algebra.
typedef struct RpTensor RpTensor;

// Convergence-rate experiment with the nonlinear preset and median statistic.
typedef struct RpRateConfig {
  enum RpModel model;
  // Ignored for Brownian motion.
  double hurst;
  enum RpScheme scheme;
  // Scheme level for the Euler schemes.
  size_t level;
  const size_t *meshes;
  size_t n_meshes;
  size_t ref_mesh;
  size_t mc;
  uint64_t seed;
  size_t substeps;
  // 0 selects a single thread.
  size_t workers;
} RpRateConfig;

typedef struct RpRateResult {
  // NaN when the fit is degenerate.
  double slope;
  double intercept;
  double half_width;
  double target;
  bool degenerate;
  bool passed;
  size_t excluded;
} RpRateResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of the last error message on this thread, without the NUL.
size_t rp_last_error_length(void);

// Copies the last error message of this thread into `buf`.
//
// # Safety
// `buf` must point to `len` writable bytes; `needed` may be null.
enum RpStatus rp_last_error_message(char *buf, size_t len, size_t *needed);

// Truncated exponential of a vector `v` of length `dim`.
//
// # Safety
// `v` must point to `dim` doubles and `out` to a writable handle slot.
enum RpStatus rp_tensor_exp(const double *v, size_t dim, size_t depth, struct RpTensor **out);

// Signature up to `depth` of the piecewise-linear path through `n_points` samples.
// `values` is row-major, `dim` entries per time.
//
// # Safety
// `times` must hold `n_points` doubles and `values` `n_points * dim` doubles.
enum RpStatus rp_tensor_signature(const double *times,
                                  const double *values,
                                  size_t n_points,
                                  size_t dim,
                                  size_t depth,
                                  struct RpTensor **out);

// Truncated tensor product `a ⊗ b`.
//
// # Safety
// `a` and `b` must be live handles.
enum RpStatus rp_tensor_mul(const struct RpTensor *a,
                            const struct RpTensor *b,
                            struct RpTensor **out);

// # Safety
// `a` must be a live handle.
enum RpStatus rp_tensor_inverse(const struct RpTensor *a, struct RpTensor **out);

// # Safety
// `a` must be a live handle.
enum RpStatus rp_tensor_log(const struct RpTensor *a, struct RpTensor **out);

// Dimension, depth and total coefficient count (level 0 included).
//
// # Safety
// `t` must be a live handle; any output pointer may be null.
enum RpStatus rp_tensor_shape(const struct RpTensor *t, size_t *dim, size_t *depth, size_t *len);

// Level-major coefficients, lexicographic within each level, level 0 first.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum RpStatus rp_tensor_coefficients(const struct RpTensor *t, double *buf, size_t len);

// Coefficient at a 0-based multi-index of length `n` (n = 0 is the scalar part).
//
// # Safety
// `multi` must hold `n` entries.
enum RpStatus rp_tensor_coefficient(const struct RpTensor *t,
                                    const size_t *multi,
                                    size_t n,
                                    double *out);

// `max_n (n! |level n|)^(1/n)`.
//
// # Safety
// `t` must be a live handle.
enum RpStatus rp_tensor_homogeneous_norm(const struct RpTensor *t, double *out);

// # Safety
// `t` must be null or a handle not yet freed.
void rp_tensor_free(struct RpTensor *t);

// Shuffle product of two words, formatted as `1*aabc + 1*abac`.
//
// # Safety
// `u`, `v` are NUL-terminated; `buf` holds `len` bytes; `needed` may be null.
enum RpStatus rp_shuffle(const char *u, const char *v, char *buf, size_t len, size_t *needed);

// # Safety
// `w` is NUL-terminated.
enum RpStatus rp_is_lyndon(const char *w, bool *out);

// Generating set for the letter multiset written as a word (`aabc`), space-separated.
//
// # Safety
// As for [`rp_shuffle`].
enum RpStatus rp_generating_set(const char *multiset, char *buf, size_t len, size_t *needed);

// Sampler for one-dimensional components on the grid `j/k`.
//
// # Safety
// `out` must be a writable handle slot.
enum RpStatus rp_sampler_new(enum RpModel kind, double hurst, size_t k, struct RpSampler **out);

// Writes the `k + 1` values of component `comp` of trajectory `traj`.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum RpStatus rp_sampler_sample(const struct RpSampler *s,
                                uint64_t seed,
                                uint64_t traj,
                                size_t comp,
                                double *buf,
                                size_t len);

// # Safety
// `s` must be null or a handle not yet freed.
void rp_sampler_free(struct RpSampler *s);

// Runs a Monte-Carlo convergence-rate experiment.
//
// # Safety
// `cfg.meshes` must hold `cfg.n_meshes` entries.
enum RpStatus rp_run_rate(const struct RpRateConfig *cfg, struct RpRateResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROUGHPATHS_H */
