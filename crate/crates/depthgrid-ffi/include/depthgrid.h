/* depthgrid C API. Generated by cbindgen; do not edit by hand. */

#ifndef DEPTHGRID_H
#define DEPTHGRID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum DgStatus {
  DG_OK = 0,
  DG_NULL_POINTER = 1,
  DG_INVALID_ARGUMENT = 2,
  DG_PARSE_ERROR = 3,
  DG_IO_ERROR = 4,
  DG_NUMERIC_ERROR = 5,
} DgStatus;

// Interpolation filter selector. Values match the model's numeric filter
// ids.
typedef enum DgFilter {
  DG_FILTER_GRID4 = 1,
  DG_FILTER_LINEAR_AVERAGE = 2,
  DG_FILTER_AVS4 = 3,
  DG_FILTER_H264_SIX = 4,
} DgFilter;

// Opaque depth image handle.
typedef struct DgImage DgImage;

// Opaque trained-model handle.
typedef struct DgModel DgModel;

// Hole-filling outcome counters.
typedef struct DgFillReport {
  uint32_t passes_run;
  uint64_t holes_initial;
  uint64_t holes_remaining;
} DgFillReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *dg_version(void);

// Copies the current thread's last error message (without the NUL) into
// `buffer` and returns the full message length. A zero return means no
// error has been recorded. `buffer` may be NULL to query the length.
//
// # Safety
// `buffer` must point to at least `capacity` writable bytes, or be NULL.
size_t dg_last_error(char *buffer, size_t capacity);

// Builds an image from row-major samples.
//
// # Safety
// `samples` must point to `width * height` readable u16 values; `out` must
// be a valid pointer.
enum DgStatus dg_image_new(uint32_t width,
                           uint32_t height,
                           uint16_t max_value,
                           const uint16_t *samples,
                           struct DgImage **out);

// Reads a PGM (P2 or P5) file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum DgStatus dg_image_load_pgm(const char *path, struct DgImage **out);

// Writes a PGM file; binary (P5) when `binary` is nonzero, plain (P2)
// otherwise.
//
// # Safety
// `image` must be a live handle from this library; `path` NUL-terminated.
enum DgStatus dg_image_save_pgm(const struct DgImage *image, const char *path, bool binary);

// Releases an image handle. NULL is a no-op.
//
// # Safety
// `image` must have been produced by this library and not freed before.
void dg_image_free(struct DgImage *image);

// Image width in pixels; 0 for NULL.
//
// # Safety
// `image` must be a live handle or NULL.
uint32_t dg_image_width(const struct DgImage *image);

// Image height in pixels; 0 for NULL.
//
// # Safety
// `image` must be a live handle or NULL.
uint32_t dg_image_height(const struct DgImage *image);

// Largest representable sample value; 0 for NULL.
//
// # Safety
// `image` must be a live handle or NULL.
uint16_t dg_image_max_value(const struct DgImage *image);

// Copies up to `capacity` row-major samples into `buffer` and returns the
// image's total sample count (call once with capacity 0 to size the
// buffer).
//
// # Safety
// `buffer` must point to `capacity` writable u16 values, or be NULL when
// `capacity` is 0.
size_t dg_image_copy_samples(const struct DgImage *image, uint16_t *buffer, size_t capacity);

// Fills zero-valued holes by masked 3x3 weighted averaging, writing a new
// image handle and (optionally) the pass/hole counters.
//
// # Safety
// `image` must be a live handle; `out_image` valid; `out_report` valid or
// NULL.
enum DgStatus dg_fill_holes(const struct DgImage *image,
                            uint32_t max_passes,
                            struct DgImage **out_image,
                            struct DgFillReport *out_report);

// Drops the last row/column as needed so both dimensions are odd.
//
// # Safety
// `image` must be a live handle; `out` valid.
enum DgStatus dg_crop_to_odd(const struct DgImage *image, struct DgImage **out);

// Halves both dimensions by phase-0 decimation. Dimensions must be odd
// (see `dg_crop_to_odd`).
//
// # Safety
// `image` must be a live handle; `out` valid.
enum DgStatus dg_downsample(const struct DgImage *image, struct DgImage **out);

// Inserts `n_insert` interpolated samples per interval on both axes.
//
// # Safety
// `image` must be a live handle; `out` valid.
enum DgStatus dg_upsample(const struct DgImage *image,
                          enum DgFilter filter,
                          uint32_t n_insert,
                          struct DgImage **out);

// MSE and PSNR between two images of identical shape and peak value. A
// perfect match reports `psnr_db = +INFINITY`.
//
// # Safety
// Handles must be live; out pointers valid or NULL.
enum DgStatus dg_psnr(const struct DgImage *reference,
                      const struct DgImage *test,
                      double *out_mse,
                      double *out_psnr_db);

// Full benchmark pipeline for one image and filter: hole-fill, crop,
// halve, re-interpolate, score. With `interior_only`, scoring excludes the
// boundary region the filter's edge clamping can touch.
//
// # Safety
// `image` must be a live handle; out pointers valid or NULL.
enum DgStatus dg_pipeline_psnr(const struct DgImage *image,
                               enum DgFilter filter,
                               uint32_t max_fill_passes,
                               bool interior_only,
                               double *out_mse,
                               double *out_psnr_db);

// Trains a PSNR prediction model from a `pixels,filter_id,psnr_db` CSV.
//
// # Safety
// `path` NUL-terminated; `out` valid.
enum DgStatus dg_model_train_csv(const char *path,
                                 uint32_t rules,
                                 uint32_t epochs,
                                 uint64_t seed,
                                 double learning_rate,
                                 double holdout_fraction,
                                 struct DgModel **out);

// Loads a model from its JSON document.
//
// # Safety
// `path` NUL-terminated; `out` valid.
enum DgStatus dg_model_load_json(const char *path, struct DgModel **out);

// Writes a model's JSON document.
//
// # Safety
// `model` must be a live handle; `path` NUL-terminated.
enum DgStatus dg_model_save_json(const struct DgModel *model, const char *path);

// Releases a model handle. NULL is a no-op.
//
// # Safety
// `model` must have been produced by this library and not freed before.
void dg_model_free(struct DgModel *model);

// Predicts PSNR (dB) from raw inputs (pixel count, filter id). Inputs are
// normalized internally with the transform stored in the model.
//
// # Safety
// `model` must be a live handle; `inputs` must point to `n_inputs` readable
// values; `out` valid.
enum DgStatus dg_model_predict(const struct DgModel *model,
                               const double *inputs,
                               size_t n_inputs,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEPTHGRID_H */
