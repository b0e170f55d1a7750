#ifndef FUSIONFRAME_H
#define FUSIONFRAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FfStatus {
  FF_STATUS_OK = 0,
  FF_STATUS_NULL_POINTER = 1,
  FF_STATUS_INVALID_INPUT = 2,
  FF_STATUS_DIMENSION_MISMATCH = 3,
  FF_STATUS_NON_FINITE = 4,
  FF_STATUS_NOT_POSITIVE_SEMIDEFINITE = 5,
  FF_STATUS_EMPTY_FAMILY = 6,
  FF_STATUS_HYPOTHESIS_VIOLATION = 7,
  FF_STATUS_COMPUTATION = 8,
  FF_STATUS_PARSE = 9,
  FF_STATUS_PANIC = 10,
} FfStatus;

typedef enum FfClassification {
  FF_CLASSIFICATION_FUSION_FRAME = 0,
  FF_CLASSIFICATION_FUSION_FRAME_SEQUENCE = 1,
  FF_CLASSIFICATION_DEGENERATE = 2,
} FfClassification;

typedef enum FfWeightStrategy {
  FF_WEIGHT_STRATEGY_GEOMETRIC_MID = 0,
  FF_WEIGHT_STRATEGY_LOWER_EDGE = 1,
  FF_WEIGHT_STRATEGY_UPPER_EDGE = 2,
} FfWeightStrategy;

// Weighted family of subspaces of one ambient space.
typedef struct FfFamily FfFamily;

// Dense complex matrix.
typedef struct FfMatrix FfMatrix;

// Subspace held by an orthonormal basis.
typedef struct FfSubspace FfSubspace;

// Numerical tolerances; see [`ff_tolerance_default`].
typedef struct FfTolerance {
  // Singular values at or below `rank_tol_factor * max(m, n) * sigma_max` count as zero.
  double rank_tol_factor;
  double cmp_tol;
  // Principal cosines within this of 1 count as a shared direction.
  double intersection_tol;
} FfTolerance;

typedef struct FfFrameBounds {
  double lower;
  double upper;
  size_t span_dim;
  size_t ambient_dim;
  enum FfClassification classification;
} FfFrameBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *ff_last_error(void);

struct FfTolerance ff_tolerance_default(void);

// Copies a row-major `rows x cols` matrix. `im` may be null.
//
// # Safety
// `re` (and `im` when non-null) must point to `rows * cols` doubles.
enum FfStatus ff_matrix_new(size_t rows,
                            size_t cols,
                            const double *re,
                            const double *im,
                            struct FfMatrix **out);

// # Safety
// `m` must be null or a handle from this library not yet freed.
void ff_matrix_free(struct FfMatrix *m);

// # Safety
// `m` must be a live handle.
enum FfStatus ff_matrix_shape(const struct FfMatrix *m, size_t *rows, size_t *cols);

// Copies the entries out row-major. `im` may be null.
//
// # Safety
// `re` (and `im` when non-null) must have room for `rows * cols` doubles.
enum FfStatus ff_matrix_copy(const struct FfMatrix *m, double *re, double *im);

// Operator norm.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum FfStatus ff_norm(const struct FfMatrix *m, double *out);

// Reduced minimum modulus; `+inf` for the zero matrix.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum FfStatus ff_gamma(const struct FfMatrix *m, struct FfTolerance tol, double *out);

// # Safety
// `m` must be a live handle and `out` writable.
enum FfStatus ff_rank(const struct FfMatrix *m, struct FfTolerance tol, size_t *out);

// Moore-Penrose pseudoinverse as a new handle.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum FfStatus ff_pinv(const struct FfMatrix *m, struct FfTolerance tol, struct FfMatrix **out);

// Column span of `generators`.
//
// # Safety
// `generators` must be a live handle and `out` writable.
enum FfStatus ff_subspace_span(const struct FfMatrix *generators,
                               struct FfTolerance tol,
                               struct FfSubspace **out);

// # Safety
// `s` must be null or a handle from this library not yet freed.
void ff_subspace_free(struct FfSubspace *s);

// # Safety
// `s` must be a live handle; `ambient_dim` and `dim` writable.
enum FfStatus ff_subspace_dims(const struct FfSubspace *s, size_t *ambient_dim, size_t *dim);

// Orthonormal basis as a new `ambient_dim x dim` matrix.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum FfStatus ff_subspace_basis(const struct FfSubspace *s, struct FfMatrix **out);

// Cosine of the Friedrichs angle.
//
// # Safety
// `m`, `n` must be live handles and `out` writable.
enum FfStatus ff_cos_friedrichs(const struct FfSubspace *m,
                                const struct FfSubspace *n,
                                struct FfTolerance tol,
                                double *out);

// Cosine of the Dixmier (minimal) angle.
//
// # Safety
// `m`, `n` must be live handles and `out` writable.
enum FfStatus ff_cos_dixmier(const struct FfSubspace *m, const struct FfSubspace *n, double *out);

// Gap `sup { dist(x, N) : x in M, |x| = 1 }`.
//
// # Safety
// `m`, `n` must be live handles and `out` writable.
enum FfStatus ff_gap(const struct FfSubspace *m, const struct FfSubspace *n, double *out);

// Empty family in `C^ambient_dim`.
//
// # Safety
// `out` must be writable.
enum FfStatus ff_family_new(size_t ambient_dim, struct FfFamily **out);

// # Safety
// `f` must be null or a handle from this library not yet freed.
void ff_family_free(struct FfFamily *f);

// Appends a copy of `s` with weight `weight > 0`.
//
// # Safety
// `f` and `s` must be live handles.
enum FfStatus ff_family_push(struct FfFamily *f, const struct FfSubspace *s, double weight);

// # Safety
// `f` must be a live handle and `out` writable.
enum FfStatus ff_family_len(const struct FfFamily *f, size_t *out);

// Weight and subspace of item `index`. Either output may be null.
//
// # Safety
// `f` must be a live handle.
enum FfStatus ff_family_item(const struct FfFamily *f,
                             size_t index,
                             double *weight,
                             struct FfSubspace **subspace);

// Optimal frame bounds on the span of the family.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum FfStatus ff_frame_bounds(const struct FfFamily *f,
                              struct FfTolerance tol,
                              struct FfFrameBounds *out);

// `c = inf γ(T P_{W_i})² / ‖T P_{W_i}‖²`, zero when `T` annihilates some `W_i`.
//
// # Safety
// `t`, `f` must be live handles and `out` writable.
enum FfStatus ff_condition_c(const struct FfMatrix *t,
                             const struct FfFamily *f,
                             struct FfTolerance tol,
                             double *out);

// The family `(T(W_i), v_i)` with weights chosen for target bounds
// `0 < a <= b`. Fails with `FF_STATUS_HYPOTHESIS_VIOLATION` when `a/b`
// exceeds the condition constant.
//
// # Safety
// `t`, `f` must be live handles and `out` writable.
enum FfStatus ff_perturb(const struct FfMatrix *t,
                         const struct FfFamily *f,
                         double a,
                         double b,
                         enum FfWeightStrategy strategy,
                         struct FfTolerance tol,
                         struct FfFamily **out);

// The block example with `blocks` blocks and angles `theta0 / 2^k`.
// `operator` may be null.
//
// # Safety
// `family` must be writable.
enum FfStatus ff_example(size_t blocks,
                         double theta0,
                         struct FfFamily **family,
                         struct FfMatrix **operator_);

// Parses a JSON instance. `*operator` is set to null when the instance has
// none; `operator` itself may be null to ignore it.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string and `family` writable.
enum FfStatus ff_instance_from_json(const char *json,
                                    struct FfTolerance tol,
                                    struct FfFamily **family,
                                    struct FfMatrix **operator_);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUSIONFRAME_H */
