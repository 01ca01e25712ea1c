#ifndef HYPERLAB_H
#define HYPERLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `HL_STATUS_OK` is zero; everything else is an error.
 */
typedef enum {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_INVALID_SPEC = 3,
  HL_STATUS_DIMENSION_MISMATCH = 4,
  HL_STATUS_DOMAIN = 5,
  HL_STATUS_FOCAL_POINT = 6,
  HL_STATUS_ORACLE_MISMATCH = 7,
  HL_STATUS_UNSUPPORTED = 8,
  HL_STATUS_BUFFER_TOO_SMALL = 9,
  HL_STATUS_INTERNAL = 10,
} HlStatus;

typedef enum {
  HL_AMBIENT_PROJECTIVE_SPACE = 0,
  HL_AMBIENT_HYPERBOLIC_SPACE = 1,
} HlAmbient;

typedef enum {
  HL_FAMILY_A0 = 0,
  HL_FAMILY_A1 = 1,
  HL_FAMILY_A2 = 2,
  HL_FAMILY_B = 3,
} HlFamily;

typedef enum {
  /**
   * `phi l = l phi`
   */
  HL_CHECK_PHI_L_COMMUTE = 0,
  /**
   * `lA = Al`
   */
  HL_CHECK_LA_COMMUTE = 1,
  /**
   * `nabla_xi l = 0`, type A models only
   */
  HL_CHECK_NABLA_XI_L = 2,
  /**
   * `A xi = alpha xi`, reported as the norm of the non-Hopf part
   */
  HL_CHECK_HOPF = 3,
} HlCheck;

typedef enum {
  HL_SUBSPACE_KER_ETA = 0,
  HL_SUBSPACE_SPAN_XI = 1,
  HL_SUBSPACE_ALL = 2,
} HlSubspace;

/**
 * Opaque model handle.
 */
typedef struct HlModel HlModel;

typedef struct {
  double factor;
  double sum_of_squares;
  double discriminant;
  bool factor_vanishes;
  bool factor_branch_rejected;
  bool witnessed;
} HlCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a model. `radius` is ignored when NaN and `k` when negative.
 *
 * # Safety
 * `out` must be valid for writes. The handle written there must be
 * released with [`hl_model_free`].
 */
HlStatus hl_model_new(HlAmbient ambient,
                      uint32_t n,
                      double c,
                      HlFamily family,
                      double radius,
                      int32_t k,
                      bool flip_normal,
                      uint64_t seed,
                      HlModel **out);

/**
 * Releases a model. Null is a no-op.
 *
 * # Safety
 * `model` must come from [`hl_model_new`] and not have been freed.
 */
void hl_model_free(HlModel *model);

/**
 * Real dimension `2n - 1` of the tangent space.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
HlStatus hl_model_dim(const HlModel *model, size_t *out);

/**
 * Hopf principal curvature `alpha`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
HlStatus hl_model_alpha(const HlModel *model, double *out);

/**
 * Copies the shape operator, row-major, into `buf` of `len` doubles
 * (at least `dim * dim`).
 *
 * # Safety
 * `model` must be a live handle and `buf` valid for `len` writes.
 */
HlStatus hl_model_shape(const HlModel *model, double *buf, size_t len);

/**
 * Evaluates one identity. `residual` and `pass` may be null.
 *
 * # Safety
 * `model` must be a live handle; non-null outputs must be valid for writes.
 */
HlStatus hl_model_check(const HlModel *model,
                        HlCheck check,
                        HlSubspace subspace,
                        double tol,
                        double *residual,
                        bool *pass);

/**
 * Runs every check on the model and writes the JSON report (without a
 * timestamp) to `out`. Free it with [`hl_string_free`]. `all_pass` may be
 * null.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for writes.
 */
HlStatus hl_model_verify_json(const HlModel *model, double tol, char **out, bool *all_pass);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hl_string_free(char *s);

/**
 * Integrates `lambda' = -(lambda^2 + kappa)` to radius `r`. With
 * `lambda0` NaN the start is focal (`lambda ~ 1/r` near 0); otherwise the
 * start is `(r0, lambda0)`. `step <= 0` selects the default step.
 *
 * # Safety
 * `out` must be valid for writes.
 */
HlStatus hl_riccati(double kappa, double r, double r0, double lambda0, double step, double *out);

/**
 * Norm of `phi l - l phi` on `span{U, phiU}` at an `alpha = 0` point.
 *
 * # Safety
 * `out` must be valid for writes.
 */
HlStatus hl_pointwise(double c, double beta, double *out);

/**
 * Arithmetic certificate at `(c, alpha, beta)`. `w1_norm_sq` is ignored
 * when NaN.
 *
 * # Safety
 * `out` must be valid for writes.
 */
HlStatus hl_certificate(double c, double alpha, double beta, double w1_norm_sq, HlCertificate *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *hl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERLAB_H */
