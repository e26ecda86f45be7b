#ifndef TREFFTZ_FEM_H
#define TREFFTZ_FEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Nodal degree of freedom.
typedef enum TfDof {
  TF_DOF_UX = 0,
  TF_DOF_UY = 1,
  TF_DOF_UZ = 2,
  TF_DOF_RX = 3,
  TF_DOF_RY = 4,
  TF_DOF_RZ = 5,
} TfDof;

// Plate element formulation.
typedef enum TfPlateVariant {
  TF_PLATE_VARIANT_ZDEQ = 0,
  TF_PLATE_VARIANT_TFEQ = 1,
  TF_PLATE_VARIANT_JFEQ = 2,
} TfPlateVariant;

// Result code of every fallible call.
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_UTF8 = 2,
  TF_STATUS_INVALID_ARGUMENT = 3,
  TF_STATUS_INVALID_MODEL = 4,
  TF_STATUS_PARSE_ERROR = 5,
  TF_STATUS_IO_ERROR = 6,
  TF_STATUS_DEGENERATE_GEOMETRY = 7,
  TF_STATUS_SINGULAR_ELEMENT = 8,
  TF_STATUS_SINGULAR_SYSTEM = 9,
  TF_STATUS_NUMERICAL_FAILURE = 10,
  // A benchmark ran but missed at least one tolerance.
  TF_STATUS_TOLERANCE_FAILURE = 11,
  TF_STATUS_PANIC = 12,
} TfStatus;

// Opaque model handle.
typedef struct TfModel TfModel;

// Opaque static solution handle.
typedef struct TfSolution TfSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call on the same thread.
const char *tf_last_error_message(void);

// Parses a model document.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum TfStatus tf_model_from_json(const char *json, struct TfModel **out);

// Reads a model document from a file.
//
// # Safety
// `path` must be a nul-terminated string and `out` a valid pointer.
enum TfStatus tf_model_read(const char *path, struct TfModel **out);

// Releases a model; null is ignored.
//
// # Safety
// `model` must come from this library and not be used afterwards.
void tf_model_free(struct TfModel *model);

// Number of nodes and elements of a model.
//
// # Safety
// All pointers must be valid.
enum TfStatus tf_model_size(const struct TfModel *model, size_t *nodes, size_t *elements);

// Switches every plate element of the model to `variant`.
//
// # Safety
// `model` must be a valid handle.
enum TfStatus tf_model_set_plate_variant(struct TfModel *model, enum TfPlateVariant variant_);

// Solves the static problem.
//
// # Safety
// `model` must be a valid handle and `out` a valid pointer.
enum TfStatus tf_solve_static(const struct TfModel *model, struct TfSolution **out);

// Releases a solution; null is ignored.
//
// # Safety
// `solution` must come from this library and not be used afterwards.
void tf_solution_free(struct TfSolution *solution);

// Length of the full DOF vector.
//
// # Safety
// `solution` must be a valid handle.
size_t tf_solution_len(const struct TfSolution *solution);

// Relative residual of the static solve.
//
// # Safety
// `solution` must be a valid handle.
double tf_solution_residual(const struct TfSolution *solution);

// Copies the full DOF vector into `buffer`, which holds `len` values.
//
// # Safety
// `buffer` must be valid for `len` writes.
enum TfStatus tf_solution_copy(const struct TfSolution *solution, double *buffer, size_t len);

// Displacement of one node DOF; the node is addressed by its model id.
//
// # Safety
// `solution` must be a valid handle and `value` a valid pointer.
enum TfStatus tf_solution_displacement(const struct TfSolution *solution,
                                       uint64_t node_id,
                                       enum TfDof dof_,
                                       double *value);

// Lowest `count` angular frequencies, written to `omegas`.
//
// # Safety
// `model` must be a valid handle and `omegas` valid for `count` writes.
enum TfStatus tf_solve_eigen(const struct TfModel *model, size_t count, double *omegas);

// Runs a benchmark case and returns its JSON report in `report_json`, to be
// released with [`tf_string_free`]. `variant` below zero selects the case
// default, `mesh` and `quadrature` of zero keep the case defaults. Returns
// `ToleranceFailure` when the run completes but misses a tolerance; the report
// is produced in that case as well.
//
// # Safety
// `case_id` must be a nul-terminated string and `report_json` a valid pointer.
enum TfStatus tf_bench_run(const char *case_id,
                           int32_t variant_,
                           size_t mesh,
                           size_t quadrature,
                           char **report_json);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void tf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREFFTZ_FEM_H */
