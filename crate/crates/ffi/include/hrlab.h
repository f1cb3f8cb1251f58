#ifndef HRLAB_H
#define HRLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HrlabStatus {
  HRLAB_STATUS_OK = 0,
  HRLAB_STATUS_NULL_POINTER = 1,
  HRLAB_STATUS_INVALID_ARGUMENT = 2,
  HRLAB_STATUS_ETA_BELOW_THRESHOLD = 3,
  HRLAB_STATUS_DEPTH_OVERFLOW = 4,
  HRLAB_STATUS_DOMAIN_ERROR = 5,
  HRLAB_STATUS_BAD_SUPPORT = 6,
  HRLAB_STATUS_TOLERANCE_NOT_MET = 7,
  HRLAB_STATUS_TAIL_NOT_CERTIFIED = 8,
  HRLAB_STATUS_ZERO_DENOMINATOR = 9,
  HRLAB_STATUS_OVERFLOW = 10,
  HRLAB_STATUS_PANIC = 11,
} HrlabStatus;

/**
 * Validated `(n, gamma, N, R, eta)`.
 */
typedef struct HrlabParams HrlabParams;

/**
 * A radial test function.
 */
typedef struct HrlabProfile HrlabProfile;

typedef struct HrlabConstant {
  double value;
  uint32_t argmin_j;
  uint32_t scanned_up_to;
  bool tail_certified;
} HrlabConstant;

typedef struct HrlabJet {
  double value;
  double d1;
  double d2;
} HrlabJet;

typedef struct HrlabReport {
  double lhs;
  double rhs_constant;
  double rhs_log;
  double rhs_log_angular;
  double rhs_total;
  double slack;
  double tolerance;
  double quad_err;
  bool passed;
} HrlabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hrlab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hrlab_version(void);

/**
 * Validate and allocate a parameter handle.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
enum HrlabStatus hrlab_params_new(uint32_t n,
                                  double gamma,
                                  uint32_t big_n,
                                  double radius,
                                  double eta,
                                  struct HrlabParams **out);

/**
 * # Safety
 * `p` must be null or a handle from [`hrlab_params_new`] not yet freed.
 */
void hrlab_params_free(struct HrlabParams *p);

/**
 * `lambda_j = j (j + n - 2)`.
 */
double hrlab_eigenvalue(uint32_t n, uint32_t j);

/**
 * Multiplicity of `lambda_j`; [`HrlabStatus::Overflow`] past `u64`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_multiplicity(uint32_t n, uint32_t j, uint64_t *out);

/**
 * `A_{n,gamma}`. An uncertified scan still fills `out` and returns
 * [`HrlabStatus::TailNotCertified`].
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_hardy_rellich_constant(uint32_t n, double gamma, struct HrlabConstant *out);

/**
 * `C_{n,gamma}`, same conventions as [`hrlab_hardy_rellich_constant`].
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_rellich_constant(uint32_t n, double gamma, struct HrlabConstant *out);

/**
 * `e_j`, with `e_0 = 0` and `e_{j+1} = exp(e_j)`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_iter_exp(uint32_t j, double *out);

/**
 * `ln_k(x)`, the `k`-fold logarithm.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_iter_log(uint32_t k, double x, double *out);

/**
 * `W_N(r) = sum_k prod_p ln_p(eta/r)^{-2}` on `0 < r < R`.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum HrlabStatus hrlab_weight_sum(uint32_t depth, double eta, double radius, double r, double *out);

/**
 * `(r-a)^p (b-r)^p q(r)` on `[a, b]`, `q` with `len` coefficients in
 * ascending order (`len = 0` means `q = 1`).
 *
 * # Safety
 * `coeffs` must be valid for `len` reads; `out` null or valid for one write.
 */
enum HrlabStatus hrlab_profile_poly_bump(double a,
                                         double b,
                                         uint32_t p,
                                         const double *coeffs,
                                         size_t len,
                                         struct HrlabProfile **out);

/**
 * `r^s u^p (1-u)^p q(u)` with `u = ln(r/a) / ln(b/a)`.
 *
 * # Safety
 * As for [`hrlab_profile_poly_bump`].
 */
enum HrlabStatus hrlab_profile_log_bump(double a,
                                        double b,
                                        uint32_t p,
                                        double exponent,
                                        const double *coeffs,
                                        size_t len,
                                        struct HrlabProfile **out);

/**
 * Profile from its JSON record, as written by the CLI.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` null or valid.
 */
enum HrlabStatus hrlab_profile_from_json(const char *json, struct HrlabProfile **out);

/**
 * `F(r), F'(r), F''(r)`.
 *
 * # Safety
 * `profile` must be a live handle or null; `out` null or valid.
 */
enum HrlabStatus hrlab_profile_eval(const struct HrlabProfile *profile,
                                    double r,
                                    struct HrlabJet *out);

/**
 * # Safety
 * `p` must be null or a live profile handle.
 */
void hrlab_profile_free(struct HrlabProfile *p);

/**
 * Hardy-Rellich inequality with log refinement for `F(r) phi_j`.
 *
 * # Safety
 * Handles must be live or null; `out` null or valid.
 */
enum HrlabStatus hrlab_theorem23_single(const struct HrlabParams *params,
                                        uint32_t j,
                                        const struct HrlabProfile *profile,
                                        double rel_tol,
                                        struct HrlabReport *out);

/**
 * Rellich inequality with log refinement for `F(r) phi_j`.
 *
 * # Safety
 * As for [`hrlab_theorem23_single`].
 */
enum HrlabStatus hrlab_rellich17_single(const struct HrlabParams *params,
                                        uint32_t j,
                                        const struct HrlabProfile *profile,
                                        double rel_tol,
                                        struct HrlabReport *out);

/**
 * Hardy-Rellich Rayleigh quotient of `F(r) phi_j`.
 *
 * # Safety
 * As for [`hrlab_theorem23_single`].
 */
enum HrlabStatus hrlab_rayleigh_quotient_single(const struct HrlabParams *params,
                                                uint32_t j,
                                                const struct HrlabProfile *profile,
                                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HRLAB_H */
