#ifndef CALABI_H
#define CALABI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CalabiStatus {
  CALABI_STATUS_OK = 0,
  CALABI_STATUS_NULL_POINTER = 1,
  CALABI_STATUS_DOMAIN = 2,
  CALABI_STATUS_INTEGRATION = 3,
  CALABI_STATUS_SOLVER = 4,
  CALABI_STATUS_PROFILE = 5,
  CALABI_STATUS_QUADRATURE = 6,
  CALABI_STATUS_BUFFER_TOO_SMALL = 7,
  CALABI_STATUS_PANIC = 8,
  CALABI_STATUS_OTHER = 9,
} CalabiStatus;

/**
 * Solved conical problem with its momentum profile.
 */
typedef struct CalabiConical CalabiConical;

/**
 * Solved smooth problem with its momentum profile.
 */
typedef struct CalabiSmooth CalabiSmooth;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t calabi_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *calabi_version(void);

/**
 * Forcing constants `B`, `C` for the shooting parameter `alpha`.
 *
 * # Safety
 * `b` and `c` must be valid for writes.
 */
enum CalabiStatus calabi_conical_coeffs(double m, double beta0, double alpha, double *b, double *c);

/**
 * Solves the conical problem; on success `*result` owns a new handle.
 *
 * # Safety
 * `result` must be valid for writes.
 */
enum CalabiStatus calabi_solve_conical(double m,
                                       double beta0,
                                       double tol,
                                       struct CalabiConical **result);

/**
 * # Safety
 * `h` must be null or a handle from [`calabi_solve_conical`] not yet freed.
 */
void calabi_conical_free(struct CalabiConical *h);

/**
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_conical_alpha(const struct CalabiConical *h, double *value);

/**
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_conical_beta_inf(const struct CalabiConical *h, double *value);

/**
 * Signed boundary residual `v(m+1) − 2(m+1)²`.
 *
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_conical_residual(const struct CalabiConical *h, double *value);

/**
 * Number of profile samples, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t calabi_conical_profile_len(const struct CalabiConical *h);

/**
 * Copies the sample abscissae and `φ`, `φ'` into caller buffers of length
 * `len`. Any buffer may be null to skip it.
 *
 * # Safety
 * `h` must be a live handle; non-null buffers must hold `len` doubles.
 */
enum CalabiStatus calabi_conical_copy_profile(const struct CalabiConical *h,
                                              double *gamma,
                                              double *phi,
                                              double *dphi,
                                              size_t len);

/**
 * Total Chern integral, `−4` for a solution.
 *
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_conical_chern_integral(const struct CalabiConical *h, double *value);

/**
 * Log Futaki invariant of the solution, zero up to quadrature error.
 *
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_conical_logbf(const struct CalabiConical *h, double *value);

/**
 * Solves the smooth problem; on success `*result` owns a new handle.
 *
 * # Safety
 * `result` must be valid for writes.
 */
enum CalabiStatus calabi_solve_smooth(double m, double tol, struct CalabiSmooth **result);

/**
 * # Safety
 * `h` must be null or a handle from [`calabi_solve_smooth`] not yet freed.
 */
void calabi_smooth_free(struct CalabiSmooth *h);

/**
 * The shooting constant `C(m)`.
 *
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_smooth_c_star(const struct CalabiSmooth *h, double *value);

/**
 * # Safety
 * `h` must be a live handle and `value` valid for writes.
 */
enum CalabiStatus calabi_smooth_residual(const struct CalabiSmooth *h, double *value);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t calabi_smooth_profile_len(const struct CalabiSmooth *h);

/**
 * Same layout as [`calabi_conical_copy_profile`].
 *
 * # Safety
 * `h` must be a live handle; non-null buffers must hold `len` doubles.
 */
enum CalabiStatus calabi_smooth_copy_profile(const struct CalabiSmooth *h,
                                             double *gamma,
                                             double *phi,
                                             double *dphi,
                                             size_t len);

/**
 * Closed-form log Futaki invariant of the smooth extremal metric with cone
 * angles `beta0`, `beta_inf`.
 *
 * # Safety
 * `value` must be valid for writes.
 */
enum CalabiStatus calabi_logbf_extremal_closed_form(double m,
                                                    double c_star,
                                                    double beta0,
                                                    double beta_inf,
                                                    double *value);

/**
 * Cone-angle line `coef_beta_inf·β∞ + coef_beta0·β₀ = rhs`.
 *
 * # Safety
 * All three outputs must be valid for writes.
 */
enum CalabiStatus calabi_cone_angle_line(double m,
                                         double c_star,
                                         double *coef_beta_inf,
                                         double *coef_beta0,
                                         double *rhs);

/**
 * Left end of the surviving shooting interval, to width `tol`.
 *
 * # Safety
 * `value` must be valid for writes.
 */
enum CalabiStatus calabi_breakdown_boundary(double m, double beta0, double tol, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CALABI_H */
