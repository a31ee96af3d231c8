#ifndef ENTCLOAK_H
#define ENTCLOAK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum EcStatus {
  EC_STATUS_OK = 0,
  EC_STATUS_NULL_POINTER = 1,
  EC_STATUS_INVALID_ARGUMENT = 2,
  EC_STATUS_SOLVER_FAILURE = 3,
  EC_STATUS_DEGENERATE_STEADY_STATE = 4,
  EC_STATUS_PANIC = 5,
} EcStatus;

/**
 * Result of a design run.
 */
typedef struct EcDesign EcDesign;

/**
 * Voxel permittivity map.
 */
typedef struct EcGrid EcGrid;

/**
 * Optimizer settings. Obtain defaults from [`ec_design_options_default`].
 */
typedef struct EcDesignOptions {
  /**
   * Emitter separation; emitters sit at z = ∓d12/2 with z-oriented dipoles.
   */
  double d12;
  double delta_eps;
  double delta_eps_min;
  double eps_max;
  double tol_accept;
  double eta_converge;
  size_t max_iterations;
  /**
   * 0 sequential, 1 frozen reference.
   */
  uint32_t sweep_mode;
  /**
   * 0 concurrence, 1 negativity.
   */
  uint32_t target;
  double pump_ratio;
  /**
   * In voxel spacings.
   */
  double exclusion_radius;
  bool bidirectional;
} EcDesignOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes. Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ec_last_error(char *buf, size_t len);

/**
 * Dissipative and coherent couplings γ12/γ0 and g12/γ0 of two z-oriented
 * dipoles a distance `d12` apart in vacuum.
 *
 * # Safety
 * `gamma12` and `g12` must be valid for writes.
 */
enum EcStatus ec_free_space_couplings(double d12, double *gamma12, double *g12);

/**
 * Steady-state concurrence and negativity of the pumped two-emitter system.
 *
 * # Safety
 * `concurrence_out` and `negativity_out` must be valid for writes.
 */
enum EcStatus ec_steady_state_entanglement(double gamma11,
                                           double gamma22,
                                           double gamma12,
                                           double g12,
                                           double pump,
                                           double *concurrence_out,
                                           double *negativity_out);

/**
 * Vacuum grid of `nx·ny·nz` voxels centred on the origin.
 *
 * # Safety
 * `out` must be valid for writes; the handle is released with [`ec_grid_free`].
 */
enum EcStatus ec_grid_new(size_t nx,
                          size_t ny,
                          size_t nz,
                          double spacing,
                          double eps_max,
                          struct EcGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from this library not yet freed.
 */
void ec_grid_free(struct EcGrid *grid);

/**
 * Number of voxels, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t ec_grid_len(const struct EcGrid *grid);

/**
 * Copies the permittivities (voxel index `(ix·ny + iy)·nz + iz`) into `eps`.
 *
 * # Safety
 * `grid` must be live and `eps` valid for `len` writes.
 */
enum EcStatus ec_grid_get_eps(const struct EcGrid *grid, double *eps, size_t len);

/**
 * Replaces the permittivities; each value must lie in [1, eps_max].
 *
 * # Safety
 * `grid` must be live and `eps` valid for `len` reads.
 */
enum EcStatus ec_grid_set_eps(struct EcGrid *grid, const double *eps, size_t len);

struct EcDesignOptions ec_design_options_default(void);

/**
 * Runs the greedy design loop starting from `grid`, which is not modified.
 *
 * # Safety
 * `grid` and `options` must be live, `out` valid for writes; the result is
 * released with [`ec_design_free`].
 */
enum EcStatus ec_optimize(const struct EcGrid *grid,
                          const struct EcDesignOptions *options,
                          struct EcDesign **out);

/**
 * # Safety
 * `design` must be null or a handle from this library not yet freed.
 */
void ec_design_free(struct EcDesign *design);

/**
 * Trace length: completed iterations plus the initial state, or 0 for null.
 *
 * # Safety
 * `design` must be null or a live handle.
 */
size_t ec_design_trace_len(const struct EcDesign *design);

/**
 * Copies the target value of every trace entry into `values`.
 *
 * # Safety
 * `design` must be live and `values` valid for `len` writes.
 */
enum EcStatus ec_design_trace(const struct EcDesign *design, double *values, size_t len);

/**
 * Final concurrence and negativity of the designed device.
 *
 * # Safety
 * `design` must be live; the outputs must be valid for writes.
 */
enum EcStatus ec_design_result(const struct EcDesign *design,
                               double *concurrence_out,
                               double *negativity_out);

/**
 * Copy of the final permittivity map as a new grid handle.
 *
 * # Safety
 * `design` must be live and `out` valid for writes.
 */
enum EcStatus ec_design_grid(const struct EcDesign *design, struct EcGrid **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTCLOAK_H */
