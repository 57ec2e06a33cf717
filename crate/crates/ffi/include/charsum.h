#ifndef CHARSUM_H
#define CHARSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CharsumStatus {
  CHARSUM_STATUS_OK = 0,
  CHARSUM_STATUS_NULL_POINTER = 1,
  CHARSUM_STATUS_INVALID_ARGUMENT = 2,
  CHARSUM_STATUS_NOT_ODD_PRIME = 3,
  CHARSUM_STATUS_NOT_COPRIME = 4,
  CHARSUM_STATUS_PRINCIPAL_CHARACTER = 5,
  CHARSUM_STATUS_DEGENERATE_NORMALIZATION = 6,
  CHARSUM_STATUS_SIZE_CONDITION = 7,
  CHARSUM_STATUS_TOLERANCE = 8,
  CHARSUM_STATUS_NUMERICAL = 9,
  CHARSUM_STATUS_PANIC = 10,
} CharsumStatus;

/**
 * Dirichlet character modulo a product of distinct odd primes.
 */
typedef struct CharsumCharacter CharsumCharacter;

/**
 * Smoothed delta-symbol approximation with fixed `Q` and `K`.
 */
typedef struct CharsumDelta CharsumDelta;

/**
 * Step-by-step reconstruction of one smooth sum.
 */
typedef struct CharsumTrace CharsumTrace;

/**
 * Complex number laid out as two doubles.
 */
typedef struct CharsumComplex {
  double re;
  double im;
} CharsumComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *charsum_last_error(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *charsum_status_name(enum CharsumStatus status);

/**
 * Builds the character `∏ χ_{p_i}^{k_i}` where `χ_p` sends the smallest primitive root to `e(1/(p−1))`.
 *
 * # Safety
 * `primes` and `exponents` must point to `len` readable values; `out_handle` must be writable.
 */
enum CharsumStatus charsum_character_new(const uint64_t *primes,
                                         const uint64_t *exponents,
                                         size_t len,
                                         struct CharsumCharacter **out_handle);

/**
 * # Safety
 * `h` must come from [`charsum_character_new`] and not be freed twice. Null is ignored.
 */
void charsum_character_free(struct CharsumCharacter *h);

/**
 * # Safety
 * `h` must be a live handle or null; `out_modulus` must be writable.
 */
enum CharsumStatus charsum_character_modulus(const struct CharsumCharacter *h,
                                             uint64_t *out_modulus);

/**
 * Value `χ(n)`; any integer `n`, reduced internally.
 *
 * # Safety
 * `h` must be a live handle or null; `out_value` must be writable.
 */
enum CharsumStatus charsum_character_eval(const struct CharsumCharacter *h,
                                          int64_t n,
                                          struct CharsumComplex *out_value);

/**
 * Smooth sum `Σ χ(n) W(n/N)` with the standard weight supported in `[1, 2]`.
 *
 * # Safety
 * `h` must be a live handle or null; `out_value` must be writable.
 */
enum CharsumStatus charsum_character_smooth_sum(const struct CharsumCharacter *h,
                                                double n_size,
                                                struct CharsumComplex *out_value);

/**
 * `L(1/2, χ)` by Hurwitz zeta values, with the smoothed approximate functional
 * equation as a cross-check. `out_error_bar` receives the smoothed method's error bar
 * and `out_discrepancy` the distance between the two methods; either may be null.
 *
 * # Safety
 * `h` must be a live handle or null; non-null out-pointers must be writable.
 */
enum CharsumStatus charsum_character_l_half(const struct CharsumCharacter *h,
                                            struct CharsumComplex *out_value,
                                            double *out_error_bar,
                                            double *out_discrepancy);

/**
 * Complete sum `Σ_{x ∈ F_p*} χ(x) χ̄(m + x) e(nx/p)` for the character `χ_p^k`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum CharsumStatus charsum_frak_s(uint64_t p,
                                  uint64_t k,
                                  int64_t m,
                                  int64_t n,
                                  struct CharsumComplex *out_value);

/**
 * Delta-symbol approximation of size `Q` restricted to `n ≡ 0 mod K`.
 *
 * # Safety
 * `out_handle` must be writable.
 */
enum CharsumStatus charsum_delta_new(double q_size, uint64_t k, struct CharsumDelta **out_handle);

/**
 * # Safety
 * `h` must come from [`charsum_delta_new`] and not be freed twice. Null is ignored.
 */
void charsum_delta_free(struct CharsumDelta *h);

/**
 * Approximation to `δ(n ≡ 0 mod K) · δ(n/K = 0)`.
 *
 * # Safety
 * `h` must be a live handle or null; `out_value` must be writable.
 */
enum CharsumStatus charsum_delta_eval(const struct CharsumDelta *h, int64_t n, double *out_value);

/**
 * Checks the admissible range for `N` at moduli `(M₁, M₂, M₃)` with window constants
 * `c_lo ≤ c_hi`. `out_upper` may be null.
 *
 * # Safety
 * Non-null out-pointers must be writable; `out_admissible` is required.
 */
enum CharsumStatus charsum_validate_range(uint64_t m1,
                                          uint64_t m2,
                                          uint64_t m3,
                                          double n_size,
                                          double c_lo,
                                          double c_hi,
                                          bool *out_admissible,
                                          double *out_upper);

/**
 * `|S_χ(N)|` divided by the bound, for `χ = χ_{M₁}^{k₁} χ_{M₂}^{k₂} χ_{M₃}^{k₃}`.
 * Fails with `SizeCondition` when `N` lies outside the window.
 *
 * # Safety
 * `moduli` and `exponents` must point to 3 readable values; `out_ratio` must be writable.
 */
enum CharsumStatus charsum_bound_ratio(const uint64_t *moduli,
                                       const uint64_t *exponents,
                                       double n_size,
                                       double c_lo,
                                       double c_hi,
                                       double *out_ratio);

/**
 * Checks the exponent region at `δ`; writes whether it holds and the largest admissible `δ`
 * (negative when none exists). `out_delta_max` may be null.
 *
 * # Safety
 * Non-null out-pointers must be writable; `out_ok` is required.
 */
enum CharsumStatus charsum_theta_check(double theta1,
                                       double theta2,
                                       double theta3,
                                       double delta,
                                       bool *out_ok,
                                       double *out_delta_max);

/**
 * Runs the full reconstruction for one instance with default tolerances.
 * A trace is produced even when a step misses its tolerance; inspect it with
 * [`charsum_trace_ok`].
 *
 * # Safety
 * `moduli` and `exponents` must point to 3 readable values; `out_handle` must be writable.
 */
enum CharsumStatus charsum_pipeline_run(const uint64_t *moduli,
                                        const uint64_t *exponents,
                                        double n_size,
                                        struct CharsumTrace **out_handle);

/**
 * # Safety
 * `h` must come from [`charsum_pipeline_run`] and not be freed twice. Null is ignored.
 */
void charsum_trace_free(struct CharsumTrace *h);

/**
 * Whether every step and halving check met its tolerance.
 *
 * # Safety
 * `h` must be a live handle or null; `out_ok` must be writable.
 */
enum CharsumStatus charsum_trace_ok(const struct CharsumTrace *h, bool *out_ok);

/**
 * Direct sum, main term, and the largest relative step residual.
 *
 * # Safety
 * `h` must be a live handle or null; non-null out-pointers must be writable.
 */
enum CharsumStatus charsum_trace_values(const struct CharsumTrace *h,
                                        struct CharsumComplex *out_direct,
                                        struct CharsumComplex *out_main_term,
                                        double *out_max_relative_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARSUM_H */
