#ifndef CIRCROBUST_H
#define CIRCROBUST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the non-zero values match the command line exit codes.
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_IO = 1,
  CR_STATUS_INVALID_INPUT = 2,
  CR_STATUS_NUMERIC = 3,
  CR_STATUS_NON_UNIQUE_MEDIAN = 4,
  CR_STATUS_EXPLOSION = 5,
  CR_STATUS_NULL_POINTER = 6,
  CR_STATUS_PANIC = 7,
} CrStatus;

typedef enum CrDispersion {
  CR_DISPERSION_CMAD = 0,
  CR_DISPERSION_CLMS = 1,
  CR_DISPERSION_CLTS = 2,
  CR_DISPERSION_CSD = 3,
} CrDispersion;

typedef enum CrModel {
  CR_MODEL_VON_MISES = 0,
  CR_MODEL_WRAPPED_NORMAL = 1,
} CrModel;

// Breakdown flag of an estimate.
typedef enum CrBreakdown {
  CR_BREAKDOWN_NONE = 0,
  CR_BREAKDOWN_EXPLOSION = 1,
  CR_BREAKDOWN_IMPLOSION = 2,
} CrBreakdown;

typedef enum CrCutoffRule {
  CR_CUTOFF_RULE_UPPER_TAIL = 0,
  CR_CUTOFF_RULE_TWO_SIDED = 1,
} CrCutoffRule;

// Opaque detection result.
typedef struct CrDetection CrDetection;

// Opaque sample of canonical angles.
typedef struct CrSample CrSample;

// Result of [`cr_estimate`].
typedef struct CrEstimate {
  double raw_dispersion;
  double mapped_csd;
  // κ̂ or σ̂; may be infinite on breakdown.
  double parameter;
  enum CrBreakdown breakdown;
} CrEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the
// next call into this library from the same thread.
const char *cr_last_error(void);

// Builds a sample from `len` angles in radians (or degrees when `degrees`
// is true). The handle is written to `out` and must be released with
// [`cr_sample_free`].
//
// # Safety
// `angles` must point to `len` readable doubles; `out` must be writable.
enum CrStatus cr_sample_new(const double *angles, size_t len, bool degrees, struct CrSample **out);

// # Safety
// `sample` must come from [`cr_sample_new`] and not be freed twice.
void cr_sample_free(struct CrSample *sample);

// Number of angles in the sample (0 for NULL).
//
// # Safety
// `sample` must be NULL or a live handle.
size_t cr_sample_len(const struct CrSample *sample);

// Circular median of the sample.
//
// # Safety
// `sample` must be a live handle; `out` must be writable.
enum CrStatus cr_median(const struct CrSample *sample, double *out);

// Robust estimate of κ (von Mises) or σ (wrapped normal).
//
// # Safety
// `sample` must be a live handle; `out` must be writable.
enum CrStatus cr_estimate(const struct CrSample *sample,
                          enum CrDispersion kind,
                          enum CrModel model,
                          struct CrEstimate *out);

// Outlier cutoff on the arc distance for parameter `psi` and level `alpha`.
//
// # Safety
// `out` must be writable.
enum CrStatus cr_cutoff(enum CrModel model,
                        double psi,
                        double alpha,
                        enum CrCutoffRule rule,
                        double *out);

// Flags outlying angles. Release the result with [`cr_detection_free`].
//
// # Safety
// `sample` must be a live handle; `out` must be writable.
enum CrStatus cr_detect(const struct CrSample *sample,
                        enum CrDispersion kind,
                        enum CrModel model,
                        double alpha,
                        enum CrCutoffRule rule,
                        bool baseline,
                        struct CrDetection **out);

// # Safety
// `det` must come from [`cr_detect`] and not be freed twice.
void cr_detection_free(struct CrDetection *det);

// Centre used for detection (median, or mean in baseline mode).
//
// # Safety
// `det` must be NULL or a live handle.
double cr_detection_center(const struct CrDetection *det);

// Estimated κ̂ or σ̂.
//
// # Safety
// `det` must be NULL or a live handle.
double cr_detection_parameter(const struct CrDetection *det);

// Cutoff, or NaN when the scale estimate exploded.
//
// # Safety
// `det` must be NULL or a live handle.
double cr_detection_cutoff(const struct CrDetection *det);

// Number of flagged points.
//
// # Safety
// `det` must be NULL or a live handle.
size_t cr_detection_flagged_count(const struct CrDetection *det);

// Writes one 0/1 flag per input point into `flags` (capacity `cap`).
// Fails with `InvalidInput` when `cap` is smaller than the sample.
//
// # Safety
// `det` must be a live handle; `flags` must point to `cap` writable bytes.
enum CrStatus cr_detection_flags(const struct CrDetection *det, uint8_t *flags, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCROBUST_H */
