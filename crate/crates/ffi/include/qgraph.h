#ifndef QGRAPH_H
#define QGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QgStatus {
  QG_STATUS_OK = 0,
  QG_STATUS_INPUT_ERROR = 1,
  QG_STATUS_INADMISSIBLE = 2,
  QG_STATUS_NUMERICAL_FAILURE = 3,
  QG_STATUS_NULL_POINTER = 4,
  QG_STATUS_PANIC = 5,
} QgStatus;

// A parsed and validated problem document.
typedef struct QgProblem QgProblem;

typedef struct QgSpectrum QgSpectrum;

typedef struct QgSolverOptions {
  double q;
  double tol_root;
  double tol_cluster;
  bool verify;
  uint32_t jobs;
} QgSolverOptions;

// One eigenvalue. `verification` is NaN when the spectrum was computed
// without eigenfunction verification.
typedef struct QgRoot {
  double k;
  uint32_t multiplicity;
  bool unresolved;
  // Final bracket width relative to `k`.
  double residual;
  double verification;
} QgRoot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *qg_last_error_message(void);

struct QgSolverOptions qg_solver_options_default(void);

// Parses a `.qg` JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QgStatus qg_problem_from_json(const char *json, struct QgProblem **out);

// # Safety
// `problem` must come from [`qg_problem_from_json`] or be null.
void qg_problem_free(struct QgProblem *problem);

// Dimension of the evolution operator `U(k)`.
//
// # Safety
// `problem` must be a live handle and `out` a valid pointer.
enum QgStatus qg_problem_dimension(const struct QgProblem *problem, uintptr_t *out);

// `det(I − U(k))` as a complex number.
//
// # Safety
// `problem` must be a live handle, `re` and `im` valid pointers.
enum QgStatus qg_secular_value(const struct QgProblem *problem, double k, double *re, double *im);

// Roots in `[k_min, k_max]`. `options` may be null, in which case the
// document's solver settings are used.
//
// # Safety
// `problem` must be a live handle, `options` null or valid, `out` valid.
enum QgStatus qg_find_spectrum(const struct QgProblem *problem,
                               double k_min,
                               double k_max,
                               const struct QgSolverOptions *options,
                               struct QgSpectrum **out);

// Number of distinct roots; 0 for a null handle.
//
// # Safety
// `spectrum` must be a live handle or null.
uintptr_t qg_spectrum_len(const struct QgSpectrum *spectrum);

// # Safety
// `spectrum` must be a live handle and `out` a valid pointer.
enum QgStatus qg_spectrum_root(const struct QgSpectrum *spectrum,
                               uintptr_t index,
                               struct QgRoot *out);

// # Safety
// `spectrum` must come from [`qg_find_spectrum`] or be null.
void qg_spectrum_free(struct QgSpectrum *spectrum);

// Largest vertex-condition residual of the eigenfunctions at `k`;
// fails with `NUMERICAL_FAILURE` if `k` is not an eigenvalue.
//
// # Safety
// `problem` must be a live handle and `out` a valid pointer.
enum QgStatus qg_verify_eigenfunction(const struct QgProblem *problem, double k, double *out);

// Vertex scattering matrix at `vertex` and `k`, written row-major as
// interleaved `(re, im)` pairs. `dim` always receives the matrix size; the
// call fails with `INPUT_ERROR` if `capacity < 2 * dim * dim`.
//
// # Safety
// `problem` must be a live handle, `vertex` NUL-terminated, `dim` valid,
// and `out` valid for `capacity` doubles (may be null when `capacity` is 0).
enum QgStatus qg_vertex_scattering(const struct QgProblem *problem,
                                   const char *vertex,
                                   double k,
                                   double *out,
                                   uintptr_t capacity,
                                   uintptr_t *dim);

// Library version as a static NUL-terminated string.
const char *qg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGRAPH_H */
