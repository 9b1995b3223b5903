#ifndef HYPERCONG_H
#define HYPERCONG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcCmForm {
  HC_CM_FORM_D3_PLUS = 0,
  HC_CM_FORM_D3_MINUS = 1,
} HcCmForm;

typedef enum HcFormat {
  HC_FORMAT_JSON = 0,
  HC_FORMAT_CSV = 1,
} HcFormat;

typedef enum HcMethod {
  HC_METHOD_COUNT = 0,
  HC_METHOD_GAUSS = 1,
} HcMethod;

typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_INVALID_ARGUMENT = 1,
  HC_STATUS_NULL_POINTER = 2,
  HC_STATUS_BUFFER_TOO_SMALL = 3,
  HC_STATUS_NOT_A_UNIT = 4,
  HC_STATUS_TOO_LARGE = 5,
  HC_STATUS_ZERO_ARGUMENT = 6,
  HC_STATUS_PRECISION_EXCEEDED = 7,
  HC_STATUS_INTEGRALITY_FAILURE = 8,
  HC_STATUS_DEGREE_MISMATCH = 9,
  HC_STATUS_INSUFFICIENT_DATA = 10,
  HC_STATUS_NO_UNIT_ROOT = 11,
  HC_STATUS_MULTIPLE_UNIT_ROOTS = 12,
  HC_STATUS_FACTOR_MISMATCH = 13,
  HC_STATUS_CONSISTENCY_FAILURE = 14,
  HC_STATUS_OUT_OF_TABLE = 15,
  HC_STATUS_IO = 16,
  HC_STATUS_PANIC = 17,
} HcStatus;

/**
 * Finite field tables for `F_{p^k}`.
 */
typedef struct HcField HcField;

/**
 * An assembled zeta factor.
 */
typedef struct HcZeta HcZeta;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *hc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/**
 * `F_{p^s}(z) mod p^k`, symmetric representative in decimal.
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `needed` may be NULL.
 */
enum HcStatus hc_truncated_sum(uint32_t d,
                               uint64_t p,
                               uint32_t s,
                               int64_t z,
                               uint32_t k,
                               char *buf,
                               size_t len,
                               size_t *needed);

/**
 * Unit root `F_{p^n}(z) / F_{p^(n-1)}(z) mod p^n`, symmetric representative.
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `needed` may be NULL.
 */
enum HcStatus hc_unit_root_limit(uint32_t d,
                                 uint64_t p,
                                 int64_t z,
                                 uint32_t n,
                                 char *buf,
                                 size_t len,
                                 size_t *needed);

/**
 * Build the tables for `F_{p^k}`.
 *
 * # Safety
 * `out` must be a valid pointer; the handle is released with `hc_field_free`.
 */
enum HcStatus hc_field_new(uint64_t p, uint32_t k, struct HcField **out);

/**
 * # Safety
 * `field` must come from `hc_field_new` and not be freed already; NULL is
 * ignored.
 */
void hc_field_free(struct HcField *field);

/**
 * `q = p^k`.
 *
 * # Safety
 * `field` and `out` must be valid.
 */
enum HcStatus hc_field_order(const struct HcField *field, uint64_t *out);

/**
 * Index of the chosen generator.
 *
 * # Safety
 * `field` and `out` must be valid.
 */
enum HcStatus hc_field_generator(const struct HcField *field, uint64_t *out);

/**
 * Discrete logarithm of the element with index `x` to the generator.
 *
 * # Safety
 * `field` and `out` must be valid.
 */
enum HcStatus hc_field_dlog(const struct HcField *field, uint64_t x, uint64_t *out);

/**
 * `H_q(t)` for the element with index `t`.
 *
 * # Safety
 * `field` and `out` must be valid.
 */
enum HcStatus hc_h_value(const struct HcField *field,
                         uint32_t d,
                         uint64_t t,
                         enum HcMethod method,
                         int64_t *out);

/**
 * Assemble `Z_p(t, T)`.
 *
 * # Safety
 * `out` must be valid; the handle is released with `hc_zeta_free`.
 */
enum HcStatus hc_zeta_compute(uint64_t p, uint32_t d, int64_t t, struct HcZeta **out);

/**
 * # Safety
 * `zeta` must come from `hc_zeta_compute` and not be freed already; NULL is
 * ignored.
 */
void hc_zeta_free(struct HcZeta *zeta);

/**
 * Degree of the reported polynomial.
 *
 * # Safety
 * `zeta` and `out` must be valid.
 */
enum HcStatus hc_zeta_degree(const struct HcZeta *zeta, size_t *out);

/**
 * Coefficient of `T^i` in decimal.
 *
 * # Safety
 * `zeta` must be valid and `buf` must point to `len` writable bytes;
 * `needed` may be NULL.
 */
enum HcStatus hc_zeta_coefficient(const struct HcZeta *zeta,
                                  size_t i,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

/**
 * Newton slopes with repetition, comma-separated (`"0,1,4,5"`).
 *
 * # Safety
 * `zeta` must be valid and `buf` must point to `len` writable bytes;
 * `needed` may be NULL.
 */
enum HcStatus hc_zeta_slopes(const struct HcZeta *zeta, char *buf, size_t len, size_t *needed);

/**
 * Unit reciprocal root mod `p^n`, symmetric representative.
 *
 * # Safety
 * `zeta` must be valid and `buf` must point to `len` writable bytes;
 * `needed` may be NULL.
 */
enum HcStatus hc_zeta_unit_root(const struct HcZeta *zeta,
                                uint32_t n,
                                char *buf,
                                size_t len,
                                size_t *needed);

/**
 * `a_1..a_n` of an eta quotient such as `"2^4 4^4"` into `out[0..n]`.
 *
 * # Safety
 * `quotient` must be a NUL-terminated string and `out` must point to `n`
 * writable `int64_t`.
 */
enum HcStatus hc_eta_coefficients(const char *quotient, size_t n, int64_t *out);

/**
 * CM closed form at `p`; 0 when `p` has no representation.
 *
 * # Safety
 * `out` must be valid.
 */
enum HcStatus hc_cm_coefficient(enum HcCmForm form, uint64_t p, int64_t *out);

/**
 * Run a sweep over `claims` (comma-separated ids or `"all"`) and write the
 * report to `out_path`. `exit_code` receives 0, 1 (a proved claim failed)
 * or 3 (internal consistency failure). `jobs = 0` uses all cores.
 *
 * # Safety
 * `claims` and `out_path` must be NUL-terminated strings; `exit_code` must
 * be valid.
 */
enum HcStatus hc_verify(const char *claims,
                        uint64_t pmax,
                        size_t jobs,
                        const char *out_path,
                        enum HcFormat format,
                        int32_t *exit_code);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HYPERCONG_H */
