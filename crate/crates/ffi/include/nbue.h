#ifndef NBUE_H
#define NBUE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum NbueStatus {
  NBUE_STATUS_OK = 0,
  NBUE_STATUS_INVALID_ARGUMENT = 1,
  NBUE_STATUS_DATA_ERROR = 2,
  NBUE_STATUS_NUMERICAL_FAILURE = 3,
  NBUE_STATUS_MISSING_EXTERNAL_TABLE = 4,
  NBUE_STATUS_NULL_POINTER = 5,
  NBUE_STATUS_BUFFER_TOO_SMALL = 6,
  NBUE_STATUS_PANIC = 7,
} NbueStatus;

typedef enum NbueVariant {
  // `gamma_j*` with the `j` passed alongside.
  NBUE_VARIANT_GENERALIZED = 0,
  // Historical Hollander-Proschan `K*`; `j` is ignored.
  NBUE_VARIANT_HP1975 = 1,
} NbueVariant;

typedef enum NbueScale {
  NBUE_SCALE_NONE = 0,
  // `1.25 sqrt(1.5 n)`
  NBUE_SCALE_PAPER_J_QUARTER = 1,
  // `sqrt(12 n)`
  NBUE_SCALE_PAPER_J_ONE = 2,
  // `c sqrt(n)` with a caller-supplied `c`
  NBUE_SCALE_USER = 3,
} NbueScale;

// Opaque handle to an exact null CDF.
typedef struct NbueExactCdf NbueExactCdf;

typedef struct NbueCdfValue {
  double p;
  uintptr_t achieved_bits;
  double estimated_abs_error;
} NbueCdfValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *nbue_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *nbue_version(void);

// The scale-invariant statistic of a sample.
//
// # Safety
// `values` must point to `len` readable doubles and `out` to one writable double.
enum NbueStatus nbue_gamma_star(const double *values,
                                uintptr_t len,
                                enum NbueVariant variant,
                                double j,
                                double *out);

// `gamma_j*` through the order-statistic form; agrees with
// [`nbue_gamma_star`] up to rounding.
//
// # Safety
// As for [`nbue_gamma_star`].
enum NbueStatus nbue_gamma_star_order_form(const double *values,
                                           uintptr_t len,
                                           double j,
                                           double *out);

// Barlow's total-time-on-test statistic.
//
// # Safety
// `values` must point to `len` readable doubles and `out` to one writable double.
enum NbueStatus nbue_ttt_statistic(const double *values, uintptr_t len, double *out);

// Normalized spacings of the sample, `len` values.
//
// # Safety
// `values` must point to `len` readable doubles and `out` to `out_len`
// writable doubles.
enum NbueStatus nbue_spacings(const double *values, uintptr_t len, double *out, uintptr_t out_len);

// The `n` weights `e_k` for exponent `j`.
//
// # Safety
// `out` must point to `out_len` writable doubles.
enum NbueStatus nbue_coefficients(uintptr_t n, double j, double *out, uintptr_t out_len);

// Multiplies `value` by the named scale factor for sample size `n`.
//
// # Safety
// `out` must point to one writable double.
enum NbueStatus nbue_scale(double value,
                           uintptr_t n,
                           enum NbueScale scale,
                           double user_constant,
                           double *out);

// Creates an exact CDF with the default precision policy. Free it with
// [`nbue_exact_cdf_free`].
//
// # Safety
// `out` must point to a writable handle pointer.
enum NbueStatus nbue_exact_cdf_new(uintptr_t n,
                                   enum NbueVariant variant,
                                   double j,
                                   struct NbueExactCdf **out);

// Creates an exact CDF with an explicit precision ladder and size cap.
//
// # Safety
// `out` must point to a writable handle pointer.
enum NbueStatus nbue_exact_cdf_new_with_policy(uintptr_t n,
                                               enum NbueVariant variant,
                                               double j,
                                               uintptr_t initial_bits,
                                               uintptr_t max_bits,
                                               double agreement_tol,
                                               uintptr_t max_n,
                                               struct NbueExactCdf **out);

// Releases a handle. NULL is ignored.
//
// # Safety
// `handle` must come from [`nbue_exact_cdf_new`] and not be used afterwards.
void nbue_exact_cdf_free(struct NbueExactCdf *handle);

// # Safety
// `handle` must be a live handle and `out` writable.
enum NbueStatus nbue_exact_cdf_eval(const struct NbueExactCdf *handle,
                                    double x,
                                    struct NbueCdfValue *out);

// # Safety
// `handle` must be a live handle and `out` writable.
enum NbueStatus nbue_exact_cdf_quantile(const struct NbueExactCdf *handle, double p, double *out);

// # Safety
// `handle` must be a live handle; `lo` and `hi` writable.
enum NbueStatus nbue_exact_cdf_support(const struct NbueExactCdf *handle, double *lo, double *hi);

// `replications` null draws of the statistic, deterministic in `seed`.
//
// # Safety
// `out` must point to `out_len` writable doubles.
enum NbueStatus nbue_simulate_null(uintptr_t n,
                                   enum NbueVariant variant,
                                   double j,
                                   uintptr_t replications,
                                   uint64_t seed,
                                   double rate,
                                   double *out,
                                   uintptr_t out_len);

// Simulated critical values of the scaled statistic, one per alpha.
//
// # Safety
// `alphas` must point to `n_alphas` readable doubles and `out` to
// `n_alphas` writable doubles.
enum NbueStatus nbue_simulated_critical_values(uintptr_t n,
                                               enum NbueVariant variant,
                                               double j,
                                               uintptr_t replications,
                                               uint64_t seed,
                                               const double *alphas,
                                               uintptr_t n_alphas,
                                               enum NbueScale scale,
                                               double user_constant,
                                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NBUE_H */
