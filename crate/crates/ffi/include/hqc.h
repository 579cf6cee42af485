/* SPDX-License-Identifier: Apache-2.0 */

#ifndef HQC_H
#define HQC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HqcStatus {
  HQC_STATUS_OK = 0,
  HQC_STATUS_NULL_POINTER = 1,
  HQC_STATUS_INVALID_ARGUMENT = 2,
  HQC_STATUS_DIMENSION_MISMATCH = 3,
  HQC_STATUS_UNSUPPORTED = 4,
  HQC_STATUS_IO = 5,
  HQC_STATUS_PARSE = 6,
  HQC_STATUS_VERSION = 7,
  HQC_STATUS_PANIC = 8,
} HqcStatus;

typedef enum HqcLayout {
  HQC_LAYOUT_TTN = 0,
  HQC_LAYOUT_MERA = 1,
} HqcLayout;

typedef enum HqcGateKind {
  HQC_GATE_KIND_SIMPLE_REAL = 0,
  HQC_GATE_KIND_SIMPLE_COMPLEX = 1,
  HQC_GATE_KIND_GENERAL_REAL = 2,
  HQC_GATE_KIND_GENERAL_COMPLEX = 3,
  HQC_GATE_KIND_ANCILLA_REAL = 4,
  HQC_GATE_KIND_ANCILLA_COMPLEX = 5,
} HqcGateKind;

/**
 * Opaque classifier: circuit layout plus parameters.
 */
typedef struct HqcModel HqcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread; empty if none. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hqc_last_error(void);

/**
 * New classifier with all parameters zero (every block the identity for exponential-map kinds).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HqcStatus hqc_model_new(enum HqcLayout layout,
                             enum HqcGateKind kind,
                             size_t n_qubits,
                             struct HqcModel **out);

/**
 * Loads a JSON checkpoint.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for one handle.
 */
enum HqcStatus hqc_model_load(const char *path, struct HqcModel **out);

/**
 * Writes the model as a JSON checkpoint, keeping any training metadata it was loaded with.
 *
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum HqcStatus hqc_model_save(const struct HqcModel *model, const char *path);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void hqc_model_free(struct HqcModel *model);

/**
 * Parameter count, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t hqc_model_num_params(const struct HqcModel *model);

/**
 * Data qubits (input features), or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t hqc_model_num_qubits(const struct HqcModel *model);

/**
 * Copies the parameters into `out`, which must hold exactly `hqc_model_num_params` values.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for `len` writes.
 */
enum HqcStatus hqc_model_get_params(const struct HqcModel *model, double *out, size_t len);

/**
 * Replaces the parameters; `len` must equal `hqc_model_num_params`.
 *
 * # Safety
 * `model` must be a live handle and `params` valid for `len` reads.
 */
enum HqcStatus hqc_model_set_params(struct HqcModel *model, const double *params, size_t len);

/**
 * Probability of outcome 0 on the readout and the thresholded label for one example whose
 * features are already angles, one per data qubit.
 *
 * # Safety
 * `model` must be a live handle, `angles` valid for `n` reads, and each output pointer either
 * null or valid for one write.
 */
enum HqcStatus hqc_model_predict(const struct HqcModel *model,
                                 const double *angles,
                                 size_t n,
                                 double *p0_out,
                                 uint8_t *label_out);

/**
 * Like `hqc_model_predict` for an arbitrary normalized input state given as `2^n` amplitudes.
 *
 * # Safety
 * `re` and `im` must be valid for `dim` reads; outputs as in `hqc_model_predict`.
 */
enum HqcStatus hqc_model_predict_state(const struct HqcModel *model,
                                       const double *re,
                                       const double *im,
                                       size_t dim,
                                       double *p0_out,
                                       uint8_t *label_out);

/**
 * OpenQASM 2.0 text of a `SimpleReal` model. Free the result with `hqc_string_free`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for one write.
 */
enum HqcStatus hqc_model_export_qasm(const struct HqcModel *model, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void hqc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HQC_H */
