#ifndef LD3_H
#define LD3_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum Ld3Status {
  LD3_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LD3_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or had the wrong length.
   */
  LD3_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A Rust panic was caught; the handle should be freed.
   */
  LD3_STATUS_PANIC = 3,
} Ld3Status;

/**
 * Phase reported by the error-rate detectors.
 */
typedef enum Ld3Phase {
  LD3_PHASE_STABLE = 0,
  LD3_PHASE_WARNING = 1,
  LD3_PHASE_DRIFT = 2,
} Ld3Phase;

/**
 * Rank fusion used by the detector.
 */
typedef enum Ld3Fusion {
  LD3_FUSION_RECIPROCAL = 0,
  LD3_FUSION_BORDA = 1,
  LD3_FUSION_CONDORCET = 2,
  LD3_FUSION_MC4 = 3,
} Ld3Fusion;

/**
 * Opaque classifier chain.
 */
typedef struct Ld3Chain Ld3Chain;

/**
 * Opaque DDM detector.
 */
typedef struct Ld3Ddm Ld3Ddm;

/**
 * Opaque label-dependency drift detector.
 */
typedef struct Ld3Detector Ld3Detector;

/**
 * Opaque EDDM detector.
 */
typedef struct Ld3Eddm Ld3Eddm;

/**
 * Detector hyperparameters.
 */
typedef struct Ld3Params {
  size_t window;
  double sigma;
  size_t max_anomalies;
  /**
   * One of the `Ld3Fusion` values.
   */
  uint32_t fusion;
} Ld3Params;

/**
 * Outcome of one detector update.
 */
typedef struct Ld3Update {
  bool drift;
  /**
   * False until both label windows are full; `correlation` is then NaN.
   */
  bool has_correlation;
  double correlation;
} Ld3Update;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *ld3_status_message(int32_t status);

/**
 * Default hyperparameters (window 500, sigma 4, no tolerated anomalies, reciprocal fusion).
 */
struct Ld3Params ld3_params_default(void);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum Ld3Status ld3_detector_new(struct Ld3Params params, size_t labels, struct Ld3Detector **out);

/**
 * Feeds one predicted label vector of `len` bytes, each 0 or 1.
 *
 * # Safety
 * `detector` must come from [`ld3_detector_new`]; `labels` must point to
 * `len` bytes; `out` must be valid for writing.
 */
enum Ld3Status ld3_detector_update(struct Ld3Detector *detector,
                                   const uint8_t *labels,
                                   size_t len,
                                   struct Ld3Update *out);

/**
 * Clears all windows.
 *
 * # Safety
 * `detector` must come from [`ld3_detector_new`].
 */
enum Ld3Status ld3_detector_reset(struct Ld3Detector *detector);

/**
 * # Safety
 * `detector` must come from [`ld3_detector_new`] or be null; it must not be used afterwards.
 */
void ld3_detector_free(struct Ld3Detector *detector);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum Ld3Status ld3_chain_new(size_t features, size_t labels, struct Ld3Chain **out);

/**
 * Predicts a label vector into `out_labels` (`labels_len` bytes).
 *
 * # Safety
 * `chain` must come from [`ld3_chain_new`]; `x` must point to `x_len`
 * doubles and `out_labels` to `labels_len` writable bytes.
 */
enum Ld3Status ld3_chain_predict(const struct Ld3Chain *chain,
                                 const double *x,
                                 size_t x_len,
                                 uint8_t *out_labels,
                                 size_t labels_len);

/**
 * Trains on one instance.
 *
 * # Safety
 * `chain` must come from [`ld3_chain_new`]; `x` must point to `x_len`
 * doubles and `labels` to `labels_len` bytes.
 */
enum Ld3Status ld3_chain_partial_fit(struct Ld3Chain *chain,
                                     const double *x,
                                     size_t x_len,
                                     const uint8_t *labels,
                                     size_t labels_len);

/**
 * Forgets all training.
 *
 * # Safety
 * `chain` must come from [`ld3_chain_new`].
 */
enum Ld3Status ld3_chain_reset(struct Ld3Chain *chain);

/**
 * # Safety
 * `chain` must come from [`ld3_chain_new`] or be null; it must not be used afterwards.
 */
void ld3_chain_free(struct Ld3Chain *chain);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum Ld3Status ld3_ddm_new(struct Ld3Ddm **out);

/**
 * Feeds one correctness bit.
 *
 * # Safety
 * `ddm` must come from [`ld3_ddm_new`]; `out` must be valid for writing.
 */
enum Ld3Status ld3_ddm_update(struct Ld3Ddm *ddm, bool correct, enum Ld3Phase *out);

/**
 * # Safety
 * `ddm` must come from [`ld3_ddm_new`] or be null; it must not be used afterwards.
 */
void ld3_ddm_free(struct Ld3Ddm *ddm);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum Ld3Status ld3_eddm_new(struct Ld3Eddm **out);

/**
 * Feeds one correctness bit.
 *
 * # Safety
 * `eddm` must come from [`ld3_eddm_new`]; `out` must be valid for writing.
 */
enum Ld3Status ld3_eddm_update(struct Ld3Eddm *eddm, bool correct, enum Ld3Phase *out);

/**
 * # Safety
 * `eddm` must come from [`ld3_eddm_new`] or be null; it must not be used afterwards.
 */
void ld3_eddm_free(struct Ld3Eddm *eddm);

/**
 * Weighted rank correlation of two global orders (label indices, best first).
 *
 * # Safety
 * `order_new` and `order_old` must each point to `n` values; `out` must be valid for writing.
 */
enum Ld3Status ld3_ws_coefficient(const size_t *order_new,
                                  const size_t *order_old,
                                  size_t n,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LD3_H */
