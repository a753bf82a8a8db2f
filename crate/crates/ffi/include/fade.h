#ifndef FADE_H
#define FADE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FadeStatus {
  FADE_STATUS_OK = 0,
  FADE_STATUS_NULL_POINTER = 1,
  FADE_STATUS_INVALID_UTF8 = 2,
  FADE_STATUS_CONFIG = 3,
  FADE_STATUS_DATA = 4,
  FADE_STATUS_IO = 5,
  FADE_STATUS_NUMERIC = 6,
  /**
   * Output buffer smaller than required; nothing was written.
   */
  FADE_STATUS_BUFFER_TOO_SMALL = 7,
  FADE_STATUS_PANIC = 8,
} FadeStatus;

/**
 * A loaded dataset with its normalized adjacencies precomputed.
 */
typedef struct FadeDataset FadeDataset;

/**
 * A trained target predictor paired with its event-only predictor.
 */
typedef struct FadePredictor FadePredictor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fade_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fade_version(void);

/**
 * Loads a JSON Lines dataset.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum FadeStatus fade_dataset_load(const char *path, struct FadeDataset **out);

/**
 * Generates a synthetic dataset from a named preset.
 *
 * # Safety
 * `preset` must be a NUL-terminated string; `out` must be writable.
 */
enum FadeStatus fade_synth_generate(const char *preset,
                                    double bias_strength,
                                    uint64_t seed,
                                    struct FadeDataset **out);

/**
 * Writes the dataset in the JSON Lines format.
 *
 * # Safety
 * `ds` must be a live handle; `path` a NUL-terminated string.
 */
enum FadeStatus fade_dataset_save(const struct FadeDataset *ds, const char *path);

/**
 * Number of instances; 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
size_t fade_dataset_len(const struct FadeDataset *ds);

/**
 * Number of classes; 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
size_t fade_dataset_num_classes(const struct FadeDataset *ds);

/**
 * Copies the true labels into `out` (capacity `cap`).
 *
 * # Safety
 * `ds` must be a live handle; `out` must hold `cap` elements.
 */
enum FadeStatus fade_dataset_labels(const struct FadeDataset *ds, uint32_t *out, size_t cap);

/**
 * # Safety
 * `ds` must be NULL or a handle not yet freed.
 */
void fade_dataset_free(struct FadeDataset *ds);

/**
 * Loads both checkpoints written by `fade train`.
 *
 * # Safety
 * Paths must be NUL-terminated strings; `out` must be writable.
 */
enum FadeStatus fade_predictor_load(const char *target_path,
                                    const char *event_only_path,
                                    struct FadePredictor **out);

/**
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t fade_predictor_num_classes(const struct FadePredictor *p);

/**
 * # Safety
 * `p` must be NULL or a handle not yet freed.
 */
void fade_predictor_free(struct FadePredictor *p);

/**
 * Debiased prediction for every instance of `ds`, with event-only logits
 * pooled over each event's instances in `ds`.
 *
 * Writes one class index per instance to `labels` (capacity `cap`) and, if
 * `logits` is not NULL, the debiased logits row-major into `logits`
 * (capacity `logits_cap`, needs len × classes).
 *
 * # Safety
 * Handles must be live; buffers must hold the stated capacities.
 */
enum FadeStatus fade_predict(const struct FadePredictor *p,
                             const struct FadeDataset *ds,
                             double beta,
                             uint32_t *labels,
                             size_t cap,
                             double *logits,
                             size_t logits_cap);

/**
 * `out[i] = target[i] - beta * event_only[i]` for `i < len`.
 *
 * # Safety
 * All three buffers must hold `len` elements.
 */
enum FadeStatus fade_debias(const double *target,
                            const double *event_only,
                            size_t len,
                            double beta,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FADE_H */
