#ifndef HADSPEC_H
#define HADSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_VERIFICATION_FAILED = 3,
  HS_STATUS_EQUI_POSITIVITY_VIOLATION = 4,
  HS_STATUS_HORIZON_EXHAUSTED = 5,
  HS_STATUS_DEPTH_TOO_LARGE = 6,
  HS_STATUS_JSON = 7,
  HS_STATUS_INTERNAL = 8,
} HsStatus;

/**
 * Opaque spectrum levels `Lambda_0, Lambda_1, ...`.
 */
typedef struct HsLevels HsLevels;

/**
 * Opaque convolution spec: a family of Hadamard triples and a selection word.
 */
typedef struct HsSpec HsSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer stays
 * valid until the next hadspec call on the same thread.
 */
const char *hs_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void hs_string_free(char *s);

/**
 * Checks unitarity of `(N, B, L)`. A non-Hadamard triple is reported through
 * `passed`, not the status; `max_deviation` is NaN when sizes differ.
 */
enum HsStatus hs_verify_triple(int64_t scale,
                               const int64_t *digits,
                               size_t n_digits,
                               const int64_t *frequencies,
                               size_t n_frequencies,
                               double tol,
                               bool *passed,
                               double *max_deviation);

/**
 * `gcd` of the pairwise differences of `B`; 0 for fewer than two digits or NULL.
 */
uint64_t hs_difference_gcd(const int64_t *digits, size_t n_digits);

/**
 * `M_B(xi)`.
 */
enum HsStatus hs_mask(const int64_t *digits, size_t n_digits, double xi, double *re, double *im);

/**
 * Zeros of `M_B` in `[lo, hi]`. `count` receives the total number of zeros;
 * at most `capacity` values are written to `out` (which may be NULL when
 * `capacity` is 0).
 */
enum HsStatus hs_mask_zeros(const int64_t *digits,
                            size_t n_digits,
                            double lo,
                            double hi,
                            double *out,
                            size_t capacity,
                            size_t *count);

/**
 * Parses a spec from JSON:
 * `{"family": [{"N": 4, "B": [0, 2], "L": [0, 1]}], "word": {"prefix": [], "period": [1]}}`.
 */
enum HsStatus hs_spec_from_json(const char *json, struct HsSpec **out);

void hs_spec_free(struct HsSpec *spec);

/**
 * Transform of the `n`-th level measure at `xi`.
 */
enum HsStatus hs_fourier_finite(const struct HsSpec *spec,
                                size_t n,
                                double xi,
                                double *re,
                                double *im);

/**
 * Transform of the tail after `skip` factors, truncated at `depth`, with a
 * bound on the truncation error.
 */
enum HsStatus hs_fourier_tail(const struct HsSpec *spec,
                              size_t skip,
                              size_t depth,
                              double xi,
                              double *re,
                              double *im,
                              double *bound);

/**
 * Builds `levels` spectrum levels. Nonpositive `delta`/`epsilon`, negative
 * `kmax` or zero `depth` select the defaults.
 */
enum HsStatus hs_build_spectrum(const struct HsSpec *spec,
                                size_t levels,
                                double delta,
                                double epsilon,
                                int64_t kmax,
                                size_t depth,
                                struct HsLevels **out);

/**
 * Parses levels previously produced by [`hs_levels_to_json`].
 */
enum HsStatus hs_levels_from_json(const char *json, struct HsLevels **out);

void hs_levels_free(struct HsLevels *levels);

/**
 * Number of constructed levels, not counting `Lambda_0`; 0 for NULL.
 */
size_t hs_levels_count(const struct HsLevels *levels);

/**
 * `m_i` for level `i` (`m_0 = 0`).
 */
enum HsStatus hs_levels_index(const struct HsLevels *levels, size_t i, size_t *m);

/**
 * Copies `Lambda_i` (sorted) into `out`. `len` receives `#Lambda_i`; at most
 * `capacity` entries are written.
 */
enum HsStatus hs_levels_get(const struct HsLevels *levels,
                            size_t i,
                            int64_t *out,
                            size_t capacity,
                            size_t *len);

/**
 * Serializes the levels; release the string with [`hs_string_free`].
 */
enum HsStatus hs_levels_to_json(const struct HsLevels *levels, char **out);

/**
 * Completeness report of the top level as JSON. `passed` is false when the
 * report fails or is not applicable.
 */
enum HsStatus hs_spectral_report(const struct HsSpec *spec,
                                 const struct HsLevels *levels,
                                 size_t grid_n,
                                 size_t depth,
                                 bool *passed,
                                 char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HADSPEC_H */
