#ifndef CHEMOSTAT_H
#define CHEMOSTAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChemostatStatus {
  CHEMOSTAT_STATUS_OK = 0,
  CHEMOSTAT_STATUS_NULL_POINTER = 1,
  CHEMOSTAT_STATUS_INVALID_ARGUMENT = 2,
  CHEMOSTAT_STATUS_INVALID_PARAMETER = 3,
  /**
   * omega >= 1: only washout exists.
   */
  CHEMOSTAT_STATUS_OMEGA_REGIME = 4,
  /**
   * An analytic method was requested for a model with decay.
   */
  CHEMOSTAT_STATUS_WRONG_METHOD = 5,
  CHEMOSTAT_STATUS_NO_SOLUTION = 6,
  CHEMOSTAT_STATUS_NUMERIC_FAILURE = 7,
  CHEMOSTAT_STATUS_BUFFER_TOO_SMALL = 8,
  CHEMOSTAT_STATUS_PANIC = 9,
} ChemostatStatus;

typedef enum ChemostatCase {
  CHEMOSTAT_CASE_A = 0,
  CHEMOSTAT_CASE_B = 1,
  CHEMOSTAT_CASE_C = 2,
  CHEMOSTAT_CASE_D = 3,
} ChemostatCase;

typedef enum ChemostatI2 {
  CHEMOSTAT_I2_EMPTY = 0,
  /**
   * (0, hi)
   */
  CHEMOSTAT_I2_FROM_ZERO = 1,
  /**
   * (lo, hi)
   */
  CHEMOSTAT_I2_INTERIOR = 2,
} ChemostatI2;

typedef enum ChemostatGamma {
  CHEMOSTAT_GAMMA_GAMMA1 = 1,
  CHEMOSTAT_GAMMA_GAMMA2 = 2,
  CHEMOSTAT_GAMMA_GAMMA3 = 3,
} ChemostatGamma;

typedef enum ChemostatMethod {
  /**
   * Analytic without decay, numeric otherwise.
   */
  CHEMOSTAT_METHOD_AUTO = 0,
  CHEMOSTAT_METHOD_ANALYTIC = 1,
  CHEMOSTAT_METHOD_NUMERIC = 2,
} ChemostatMethod;

typedef enum ChemostatRegion {
  CHEMOSTAT_REGION_UNCLASSIFIED = 0,
  CHEMOSTAT_REGION_J1 = 1,
  CHEMOSTAT_REGION_J2 = 2,
  CHEMOSTAT_REGION_J3 = 3,
  CHEMOSTAT_REGION_J4 = 4,
  CHEMOSTAT_REGION_J5 = 5,
} ChemostatRegion;

typedef enum ChemostatKind {
  CHEMOSTAT_KIND_SS1 = 0,
  CHEMOSTAT_KIND_SS2_FLAT = 1,
  CHEMOSTAT_KIND_SS2_SHARP = 2,
  CHEMOSTAT_KIND_SS2_DOUBLE = 3,
  CHEMOSTAT_KIND_SS3 = 4,
} ChemostatKind;

typedef enum ChemostatVerdict {
  CHEMOSTAT_VERDICT_STABLE = 0,
  CHEMOSTAT_VERDICT_UNSTABLE = 1,
  CHEMOSTAT_VERDICT_MARGINAL = 2,
} ChemostatVerdict;

/**
 * Opaque model handle.
 */
typedef struct ChemostatModel ChemostatModel;

/**
 * Critical dilution rates. Absent values are NaN.
 */
typedef struct ChemostatCriticals {
  double d1;
  enum ChemostatI2 i2;
  double i2_lo;
  double i2_hi;
  double d3;
  bool i3_equals_i2;
} ChemostatCriticals;

typedef struct ChemostatLabel {
  enum ChemostatRegion region;
  bool near_boundary;
} ChemostatLabel;

typedef struct ChemostatSteadyState {
  enum ChemostatKind kind;
  /**
   * `(x0, x1, x2, s0, s1, s2)`
   */
  double rescaled[6];
  /**
   * `(X_ch, X_ph, X_H2, S_ch, S_ph, S_H2)`
   */
  double full[6];
  enum ChemostatVerdict verdict;
  double max_real_part;
} ChemostatSteadyState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * call into the library from the same thread.
 */
const char *chemostat_last_error(void);

/**
 * Model from a preset case; `kdec` is applied to all three tiers.
 */
enum ChemostatStatus chemostat_model_from_case(enum ChemostatCase case_,
                                               double kdec,
                                               struct ChemostatModel **out);

/**
 * Model from a JSON parameter document. Omitted keys take nominal values.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string.
 */
enum ChemostatStatus chemostat_model_from_json(const char *json, struct ChemostatModel **out);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void chemostat_model_free(struct ChemostatModel *model);

/**
 * `omega` and the inflow scale `Y3*Y4` of the rescaled model.
 */
enum ChemostatStatus chemostat_model_scales(const struct ChemostatModel *model,
                                            double *omega,
                                            double *y3y4);

enum ChemostatStatus chemostat_criticals(const struct ChemostatModel *model,
                                         struct ChemostatCriticals *out);

/**
 * Value of a Gamma curve at dilution `d`, in chlorophenol inflow units.
 * `defined` is false where the curve does not exist.
 */
enum ChemostatStatus chemostat_gamma(const struct ChemostatModel *model,
                                     enum ChemostatGamma which,
                                     enum ChemostatMethod method,
                                     double d,
                                     double *value,
                                     bool *defined);

/**
 * Region label of the operating point `(d, s_ch_in)`.
 */
enum ChemostatStatus chemostat_classify(const struct ChemostatModel *model,
                                        double d,
                                        double s_ch_in,
                                        enum ChemostatMethod method,
                                        struct ChemostatLabel *out);

/**
 * All steady states at `(d, s_ch_in)` with their numeric stability.
 *
 * `count` receives the number of states (at most 4) even when `capacity` is
 * too small, in which case `BufferTooSmall` is returned and nothing is written.
 *
 * # Safety
 * `buf` must point to `capacity` writable elements, or be null with `capacity == 0`.
 */
enum ChemostatStatus chemostat_steady_states(const struct ChemostatModel *model,
                                             double d,
                                             double s_ch_in,
                                             struct ChemostatSteadyState *buf,
                                             size_t capacity,
                                             size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEMOSTAT_H */
