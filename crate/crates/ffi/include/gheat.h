#ifndef GHEAT_H
#define GHEAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GheatStatus {
  GHEAT_STATUS_OK = 0,
  GHEAT_STATUS_NULL_POINTER = 1,
  GHEAT_STATUS_DOMAIN = 2,
  GHEAT_STATUS_RANGE = 3,
  GHEAT_STATUS_NO_BRACKET = 4,
  GHEAT_STATUS_NO_CONVERGENCE = 5,
  GHEAT_STATUS_IDENTITY_VIOLATION = 6,
  GHEAT_STATUS_NON_FINITE = 7,
  GHEAT_STATUS_PANIC = 8,
} GheatStatus;

/**
 * Opaque handle to an immutable profile.
 */
typedef struct GheatProfile GheatProfile;

/**
 * Solved free boundary. `d_scaled` is NaN when `sigma == 0`.
 */
typedef struct GheatFreeBoundary {
  uint32_t n;
  double sigma;
  double c;
  double k;
  double d_scaled;
  double residual;
  size_t iterations;
} GheatFreeBoundary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on the calling thread, or NULL if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *gheat_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gheat_version(void);

/**
 * `∫_x^∞ e^{-t²/2} dt`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_gaussian_tail(double x, double *out);

/**
 * `e^{x²/2} ∫_x^∞ e^{-t²/2} dt`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_scaled_tail(double x, double *out);

/**
 * `m_n(x) = ∫_x^∞ (s - x)^{2n+1} e^{-s²/2} ds`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_m_fn(uint32_t n, double x, double *out);

/**
 * Checks the exact polynomial identities of order `n`; `*holds` is set to
 * true or false. A violated identity is not an error.
 *
 * # Safety
 * `holds` must be NULL or valid for writing one `bool`.
 */
enum GheatStatus gheat_pair_identities(uint32_t n, bool *holds);

/**
 * Solves for the free boundary of order `n` at volatility floor `sigma` in
 * `[0, 1)`; `tol` bounds the matching residual at the returned root.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `GheatFreeBoundary`.
 */
enum GheatStatus gheat_free_boundary_solve(uint32_t n,
                                           double sigma,
                                           double tol,
                                           struct GheatFreeBoundary *out);

/**
 * Builds the profile of order `n` for `sigma` in `[0, 1]`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one pointer. On success the handle
 * must eventually be passed to `gheat_profile_free`.
 */
enum GheatStatus gheat_profile_new(uint32_t n, double sigma, struct GheatProfile **out);

/**
 * Releases a profile. NULL is ignored.
 *
 * # Safety
 * `profile` must be NULL or a handle from `gheat_profile_new` not yet freed.
 */
void gheat_profile_free(struct GheatProfile *profile);

/**
 * `P`, `P'` or `P''` (for `order` 0, 1, 2) at `x`.
 *
 * # Safety
 * `profile` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum GheatStatus gheat_profile_eval(const struct GheatProfile *profile,
                                    double x,
                                    uint8_t order,
                                    double *out);

/**
 * Solution `u(t, x)` with initial value `x^{2n+1}`.
 *
 * # Safety
 * `profile` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum GheatStatus gheat_profile_solution(const struct GheatProfile *profile,
                                        double t,
                                        double x,
                                        double *out);

/**
 * Free boundary abscissa of the profile. Fails with `Domain` for `sigma == 1`,
 * where there is none.
 *
 * # Safety
 * `profile` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum GheatStatus gheat_profile_boundary(const struct GheatProfile *profile, double *out);

/**
 * Sublinear expectation of `B_t^{2n+1}`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_odd_moment(uint32_t n, double sigma, double t, double *out);

/**
 * Sublinear expectation of `(x + B_t)^m` for any power `m ≥ 1`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_monomial_expectation(uint32_t m,
                                            double sigma,
                                            double t,
                                            double x,
                                            double *out);

/**
 * Worst-case `E[(log S_T)^m]` for `d log S = mu dt + sigma_t dB` with
 * `sigma_t` in `[sigma, 1]`.
 *
 * # Safety
 * `out` must be NULL or valid for writing one `double`.
 */
enum GheatStatus gheat_finance_log_moment(uint32_t m,
                                          double sigma,
                                          double mu,
                                          double horizon,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHEAT_H */
