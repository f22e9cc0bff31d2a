#ifndef BIFLOC_H
#define BIFLOC_H

#pragma once

/* Generated by cbindgen from bifloc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which side of a nullcline critical point an abscissa sits on.
 */
typedef enum BiflocBranch {
  BIFLOC_BRANCH_ASCENDING = 0,
  BIFLOC_BRANCH_DESCENDING = 1,
  BIFLOC_BRANCH_CRITICAL = 2,
} BiflocBranch;

/**
 * Result of every FFI call.
 */
typedef enum BiflocStatus {
  BIFLOC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BIFLOC_STATUS_NULL_POINTER = 1,
  /**
   * Parameter values or shapes were rejected by the model constructors.
   */
  BIFLOC_STATUS_INVALID_PARAMETER = 2,
  /**
   * The query point lies outside the admissible prey interval.
   */
  BIFLOC_STATUS_OUT_OF_DOMAIN = 3,
  /**
   * A numerical routine failed (degenerate crossing, non-finite state, ...).
   */
  BIFLOC_STATUS_NUMERICS = 4,
  /**
   * A panic was caught at the FFI boundary; the handle is still valid.
   */
  BIFLOC_STATUS_PANIC = 5,
} BiflocStatus;

/**
 * Opaque model handle.
 */
typedef struct BiflocModel BiflocModel;

/**
 * Interior critical point of the prey nullcline height.
 */
typedef struct BiflocCriticalPoint {
  double x;
  double g_value;
  bool is_max;
} BiflocCriticalPoint;

/**
 * Coexistence equilibrium with its nullcline branch label.
 */
typedef struct BiflocEquilibrium {
  double x;
  double y;
  double residual;
  enum BiflocBranch branch;
} BiflocEquilibrium;

/**
 * Trace, determinant, discriminant, and eigenvalue pair of a Jacobian.
 */
typedef struct BiflocSpectralSummary {
  double trace;
  double det;
  double discriminant;
  double eigenvalue_re[2];
  double eigenvalue_im[2];
  bool near_double;
} BiflocSpectralSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a Bazykin model handle.
 *
 * On success writes the new handle to `out` and returns `Ok`. The handle
 * must be released with `bifloc_model_free`.
 */
enum BiflocStatus bifloc_bazykin_new(double r,
                                     double k,
                                     double a,
                                     double b,
                                     double e,
                                     double d,
                                     double sigma,
                                     struct BiflocModel **out);

/**
 * Creates a Holling type IV model handle from the raw parameters.
 */
enum BiflocStatus bifloc_holling4_new(double a,
                                      double h1,
                                      double h2,
                                      double delta,
                                      double beta,
                                      struct BiflocModel **out);

/**
 * Creates a Holling type IV model handle on the coupled slice, where the
 * single load `h10` fixes the response scale and both harvesting rates.
 */
enum BiflocStatus bifloc_holling4_coupled_new(double h10,
                                              double h2,
                                              double delta,
                                              double beta,
                                              struct BiflocModel **out);

/**
 * Creates a Crowley-Martin flow model handle.
 */
enum BiflocStatus bifloc_crowley_martin_new(double rho,
                                            double k,
                                            double a,
                                            double b,
                                            double c,
                                            double gamma,
                                            double d,
                                            struct BiflocModel **out);

/**
 * Creates the forward-Euler discretization of the Crowley-Martin flow.
 */
enum BiflocStatus bifloc_discrete_crowley_martin_new(double rho,
                                                     double k,
                                                     double a,
                                                     double b,
                                                     double c,
                                                     double gamma,
                                                     double d,
                                                     struct BiflocModel **out);

/**
 * Releases a model handle. Passing null is a no-op.
 */
void bifloc_model_free(struct BiflocModel *m);

/**
 * Writes true if the model advances in discrete time.
 */
enum BiflocStatus bifloc_model_is_map(const struct BiflocModel *m, bool *out);

/**
 * Evaluates the vector field (or one-step displacement map) at (x, y).
 *
 * `out` must point to at least two doubles; they receive (dx, dy).
 */
enum BiflocStatus bifloc_vector_field(const struct BiflocModel *m, double x, double y, double *out);

/**
 * Evaluates the Jacobian at (x, y).
 *
 * `out` must point to at least four doubles; they receive the matrix in
 * row-major order.
 */
enum BiflocStatus bifloc_jacobian(const struct BiflocModel *m, double x, double y, double *out);

/**
 * Writes the open prey interval (lo, hi) on which the nullcline height is
 * defined and positive-capable.
 */
enum BiflocStatus bifloc_domain(const struct BiflocModel *m, double *out_lo, double *out_hi);

/**
 * Evaluates the prey-nullcline predator height g(x).
 */
enum BiflocStatus bifloc_nullcline_value(const struct BiflocModel *m, double x, double *out);

/**
 * Evaluates the prey-nullcline slope g'(x).
 */
enum BiflocStatus bifloc_nullcline_derivative(const struct BiflocModel *m, double x, double *out);

/**
 * Lists the interior critical points of the nullcline height.
 *
 * The full count is written to `total`; at most `cap` leading entries are
 * copied to `out`. `out` may be null only when `cap` is zero.
 */
enum BiflocStatus bifloc_critical_points(const struct BiflocModel *m,
                                         struct BiflocCriticalPoint *out,
                                         size_t cap,
                                         size_t *total);

/**
 * Lists the coexistence equilibria, one per nullcline branch cell at most.
 *
 * Same buffer protocol as `bifloc_critical_points`.
 */
enum BiflocStatus bifloc_equilibria(const struct BiflocModel *m,
                                    struct BiflocEquilibrium *out,
                                    size_t cap,
                                    size_t *total);

/**
 * Computes trace, determinant, discriminant, and eigenvalues of the
 * Jacobian at (x, y).
 */
enum BiflocStatus bifloc_spectral_summary(const struct BiflocModel *m,
                                          double x,
                                          double y,
                                          struct BiflocSpectralSummary *out);

/**
 * Returns the message for the most recent failure on this thread.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *bifloc_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIFLOC_H */
