#ifndef LANDELTA_H
#define LANDELTA_H

/* Generated by cbindgen from the landelta-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum {
  LdStatus_Ok = 0,
  LdStatus_InvalidArgument = 1,
  LdStatus_GeometryError = 2,
  LdStatus_OnLandauLevel = 3,
  LdStatus_NoEigenvalues = 4,
  LdStatus_NumericalError = 5,
  LdStatus_BufferTooSmall = 6,
  LdStatus_InternalPanic = 7,
} LdStatus;

/**
 * Which side of a Landau level a cluster is requested on.
 */
typedef enum {
  LdSide_Above = 0,
  LdSide_Below = 1,
} LdSide;

/**
 * Opaque closed-curve handle.
 */
typedef struct LdCurve LdCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ld_status_message(LdStatus status);

/**
 * Build a circle of the given center, radius, and panel count.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
LdStatus ld_curve_circle(double center_x,
                         double center_y,
                         double radius,
                         uintptr_t n_panels,
                         LdCurve **out);

/**
 * Build a trigonometric star-shaped curve
 * r(theta) = base_radius + sum_k cos_coef[k] cos((k+1) theta) + sin_coef[k] sin((k+1) theta).
 *
 * # Safety
 * Coefficient pointers must reference arrays of the stated lengths (or be
 * null when the length is zero); `out` must be writable.
 */
LdStatus ld_curve_fourier(double center_x,
                          double center_y,
                          double base_radius,
                          const double *cos_coef,
                          uintptr_t cos_len,
                          const double *sin_coef,
                          uintptr_t sin_len,
                          uintptr_t n_panels,
                          LdCurve **out);

/**
 * Release a curve handle. Null is a no-op.
 *
 * # Safety
 * `curve` must be a pointer previously returned by a curve constructor, and
 * must not be used afterwards.
 */
void ld_curve_free(LdCurve *curve);

/**
 * Total arc length of the curve.
 *
 * # Safety
 * `curve` must be a live handle.
 */
double ld_curve_length(const LdCurve *curve);

/**
 * Landau level B(2q + 1).
 */
double ld_landau_level(uintptr_t q, double b);

/**
 * Green function of the Landau Hamiltonian at (x, y), spectral parameter
 * lambda = lambda_re + i lambda_im, field strength b.
 *
 * # Safety
 * `out_re` and `out_im` must be writable.
 */
LdStatus ld_green_function(double x1,
                           double x2,
                           double y1,
                           double y2,
                           double lambda_re,
                           double lambda_im,
                           double b,
                           double *out_re,
                           double *out_im);

/**
 * Logarithmic capacity of the full curve (s_b <= s_a) or of the sub-arc
 * [s_a, s_b] in arc length.
 *
 * # Safety
 * `curve` must be live and `out` writable.
 */
LdStatus ld_capacity(const LdCurve *curve, double s_a, double s_b, double *out);

/**
 * Logarithmic capacity of the straight segment from (ax, ay) to (bx, by).
 *
 * # Safety
 * `out` must be writable.
 */
LdStatus ld_capacity_segment(double ax,
                             double ay,
                             double bx,
                             double by,
                             uintptr_t n_panels,
                             double *out);

/**
 * Operator norm of the symmetrized Weyl matrix M(lambda) on the curve.
 *
 * # Safety
 * `curve` must be live and `out` writable.
 */
LdStatus ld_weyl_norm(const LdCurve *curve,
                      double lambda_re,
                      double lambda_im,
                      double b,
                      double *out);

/**
 * Singular values of the level-q Toeplitz-type operator restricted to the
 * curve (s_b <= s_a) or the sub-arc [s_a, s_b]. Writes up to `capacity`
 * values into `out_svals`, stores the count in `out_len`.
 *
 * # Safety
 * `curve` must be live; `out_svals` must have room for `capacity` doubles;
 * `out_len` must be writable.
 */
LdStatus ld_toeplitz_singular_values(const LdCurve *curve,
                                     uintptr_t q,
                                     double b,
                                     int64_t m_max,
                                     double s_a,
                                     double s_b,
                                     double *out_svals,
                                     uintptr_t capacity,
                                     uintptr_t *out_len);

/**
 * Perturbed eigenvalues near Lambda_q for a constant strength alpha on the
 * full curve (s_b <= s_a) or on the arc-length window [s_a, s_b]. Writes up
 * to `capacity` (lambda, gap) pairs, nearest-last in the distance ordering.
 *
 * # Safety
 * `curve` must be live; `out_lambda` and `out_gap` must each have room for
 * `capacity` doubles; `out_len` must be writable.
 */
LdStatus ld_cluster_eigenvalues(const LdCurve *curve,
                                double alpha,
                                double s_a,
                                double s_b,
                                uintptr_t q,
                                LdSide side,
                                uintptr_t k_max,
                                double b,
                                double *out_lambda,
                                double *out_gap,
                                uintptr_t capacity,
                                uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANDELTA_H */
