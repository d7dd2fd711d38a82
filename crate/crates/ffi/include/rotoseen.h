#ifndef ROTOSEEN_H
#define ROTOSEEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum rr_status {
  RR_STATUS_OK = 0,
  RR_STATUS_INVALID_ARGUMENT = 1,
  RR_STATUS_NUMERICAL_PRECONDITION = 2,
  RR_STATUS_NOT_FOUND = 3,
  RR_STATUS_NULL_POINTER = 4,
  RR_STATUS_PANIC = 5,
} rr_status;

typedef enum rr_symbol {
  RR_SYMBOL_M = 0,
  RR_SYMBOL_M0 = 1,
  RR_SYMBOL_M1 = 2,
  RR_SYMBOL_M2 = 3,
  /**
   * Uses the `j`, `l` arguments (0-based).
   */
  RR_SYMBOL_MJL = 4,
} rr_symbol;

typedef enum rr_ratio_kind {
  RR_RATIO_KIND_RATIONAL = 0,
  RR_RATIO_KIND_SQRT2 = 1,
  RR_RATIO_KIND_GOLDEN = 2,
} rr_ratio_kind;

typedef enum rr_window {
  RR_WINDOW_RESONANT = 0,
  RR_WINDOW_LITERAL = 1,
} rr_window;

typedef enum rr_rhs_kind {
  RR_RHS_KIND_AXIAL = 0,
  RR_RHS_KIND_SWIRL = 1,
  RR_RHS_KIND_GRADIENT = 2,
} rr_rhs_kind;

/**
 * A closed-form right-hand side.
 */
typedef struct rr_field rr_field;

/**
 * A counterexample item.
 */
typedef struct rr_item rr_item;

/**
 * A rotating-frame resolvent solution.
 */
typedef struct rr_solution rr_solution;

typedef struct rr_params {
  double lambda;
  double omega;
  double s;
  double period;
  double q;
} rr_params;

typedef struct rr_complex {
  double re;
  double im;
} rr_complex;

typedef struct rr_item_info {
  uint64_t n;
  int64_t k_n;
  int64_t ell_n;
  double sigma_n;
  double s_n;
  double alpha;
  double omega;
  double lambda;
} rr_item_info;

typedef struct rr_blowup {
  double lhs;
  double rhs;
  double ratio;
  /**
   * `C√n`, or 0 when `has_certified` is false.
   */
  double certified_lower;
  bool has_certified;
} rr_blowup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full length including the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t rr_last_error_message(char *buf, size_t len);

/**
 * `min_k |s − ωk|`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum rr_status rr_dist_to_lattice(double s, double omega, double *out);

/**
 * Smallest positive element of `αℤ + ωℤ` for `α/ω = c/d`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum rr_status rr_min_positive(uint64_t c, uint64_t d, double omega, double *out);

/**
 * Evaluate one resolvent multiplier at `(k, ξ)`; `which` is an `rr_symbol`.
 *
 * # Safety
 * `params` and `out` must be null or valid; `xi` must be null or point to
 * three doubles.
 */
enum rr_status rr_eval_symbol(const struct rr_params *params,
                              double k,
                              const double *xi,
                              int32_t which,
                              uint32_t j,
                              uint32_t l,
                              struct rr_complex *out);

/**
 * Build counterexample item `n` for `α/ω` given by `kind` (an
 * `rr_ratio_kind`; `c`, `d` are read only for `Rational`, which is always
 * refused). `window` is an `rr_window`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum rr_status rr_item_build(uint64_t n,
                             int32_t kind,
                             uint64_t c,
                             uint64_t d,
                             double omega,
                             double lambda,
                             int32_t window,
                             struct rr_item **out);

/**
 * # Safety
 * `item` must be null or a handle from `rr_item_build`, freed once.
 */
void rr_item_free(struct rr_item *item);

/**
 * # Safety
 * `item` must be null or a live handle; `out` null or valid.
 */
enum rr_status rr_item_get(const struct rr_item *item, struct rr_item_info *out);

/**
 * # Safety
 * `item` must be null or a live handle; `out` null or valid.
 */
enum rr_status rr_item_blowup(const struct rr_item *item, struct rr_blowup *out);

/**
 * Closed-form Gaussian right-hand side of width `width`; `kind` is an
 * `rr_rhs_kind`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum rr_status rr_rhs_new(int32_t kind, double width, struct rr_field **out);

/**
 * # Safety
 * `field` must be null or a handle from `rr_rhs_new`, freed once.
 */
void rr_field_free(struct rr_field *field);

/**
 * Rotating-frame resolvent solve; the residual is checked on a grid of
 * `grid_points` per axis over `[−grid_half_width, grid_half_width]³`.
 *
 * # Safety
 * Pointers must be null or valid; `rhs` a live handle.
 */
enum rr_status rr_solve(const struct rr_field *rhs,
                        const struct rr_params *params,
                        size_t n_time_nodes,
                        double grid_half_width,
                        size_t grid_points,
                        struct rr_solution **out);

/**
 * # Safety
 * `sol` must be null or a handle from `rr_solve`, freed once.
 */
void rr_solution_free(struct rr_solution *sol);

/**
 * `v̂(ξ)` into `out[0..3]`.
 *
 * # Safety
 * `sol` a live handle; `xi` three doubles; `out` three `RrComplex`.
 */
enum rr_status rr_solution_velocity(const struct rr_solution *sol,
                                    const double *xi,
                                    struct rr_complex *out);

/**
 * # Safety
 * `sol` a live handle; `out` null or valid.
 */
enum rr_status rr_solution_residual(const struct rr_solution *sol, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROTOSEEN_H */
