#ifndef HYPERROUTE_H
#define HYPERROUTE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HrStatus {
  HR_STATUS_OK = 0,
  HR_STATUS_NULL_POINTER = 1,
  HR_STATUS_OUT_OF_RANGE = 2,
  HR_STATUS_INVALID_PERMUTATION = 3,
  HR_STATUS_DIMENSION_MISMATCH = 4,
  HR_STATUS_BUFFER_TOO_SMALL = 5,
  HR_STATUS_NOT_A_PERMUTATION = 6,
  HR_STATUS_PHASE_MISMATCH = 7,
  HR_STATUS_UNROUTABLE = 8,
  HR_STATUS_INVALID_INPUT = 9,
  HR_STATUS_PANIC = 10,
} HrStatus;

/**
 * Opaque network handle: a Z_2^d(l) graph with its spectral table.
 */
typedef struct HrNetwork HrNetwork;

/**
 * Opaque route plan handle.
 */
typedef struct HrRoute HrRoute;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *hr_status_message(enum HrStatus status);

/**
 * Builds Z_2^d(l) rotated by `perm` (1-based images, `perm_len == d`).
 * Pass `perm = NULL` for the identity.
 *
 * # Safety
 * `perm` must be NULL or point to `perm_len` readable `u32`s; `out` must be
 * a valid pointer. The handle written to `out` must be released with
 * [`hr_network_free`].
 */
enum HrStatus hr_network_new(uint32_t d,
                             uint32_t l,
                             const uint32_t *perm,
                             size_t perm_len,
                             struct HrNetwork **out);

/**
 * # Safety
 * `net` must be NULL or a handle from [`hr_network_new`] not yet freed.
 */
void hr_network_free(struct HrNetwork *net);

/**
 * Number of nodes, 0 for NULL.
 *
 * # Safety
 * `net` must be NULL or a live handle.
 */
size_t hr_network_node_count(const struct HrNetwork *net);

/**
 * Degree `|S^l_d|`, 0 for NULL.
 *
 * # Safety
 * `net` must be NULL or a live handle.
 */
size_t hr_network_degree(const struct HrNetwork *net);

/**
 * Phase offset `k` (the permutation at `tau = pi/2` carries `exp(-i k pi/2)`).
 *
 * # Safety
 * `net` must be a live handle and `out_k` a valid pointer.
 */
enum HrStatus hr_network_phase_offset(const struct HrNetwork *net, int64_t *out_k);

/**
 * Writes the `2^d` eigenvalues indexed by Walsh–Hadamard row.
 *
 * # Safety
 * `out` must point to `len` writable `int64_t`s.
 */
enum HrStatus hr_network_eigenvalues(const struct HrNetwork *net, int64_t *out, size_t len);

/**
 * Evolves a state (split real/imaginary arrays of length `2^d`) for `tau`.
 * Output arrays may alias the inputs.
 *
 * # Safety
 * All four arrays must hold `len` doubles.
 */
enum HrStatus hr_network_evolve(const struct HrNetwork *net,
                                const double *re_in,
                                const double *im_in,
                                size_t len,
                                double tau,
                                double *re_out,
                                double *im_out);

/**
 * `|<target| U(tau) |source>|^2`.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
enum HrStatus hr_network_transfer_probability(const struct HrNetwork *net,
                                              size_t source,
                                              size_t target,
                                              double tau,
                                              double *out);

/**
 * Numerically extracts the XOR mask realized at `tau`. Returns
 * `NotAPermutation` or `PhaseMismatch` when the evolution does not permute
 * nodes within `tolerance`; `out_leak` is filled in either case when the
 * leak is known.
 *
 * # Safety
 * `net` must be a live handle; `out_mask` and `out_leak` valid pointers.
 */
enum HrStatus hr_network_extract_mask(const struct HrNetwork *net,
                                      double tau,
                                      double tolerance,
                                      uint32_t *out_mask,
                                      double *out_leak);

/**
 * Predicted mask and phase offset of Z_2^d(l) under `perm` at `tau = pi/2`.
 *
 * # Safety
 * `perm` must be NULL or hold `perm_len` `u32`s; outputs must be valid.
 */
enum HrStatus hr_predicted_mask(uint32_t d,
                                uint32_t l,
                                const uint32_t *perm,
                                size_t perm_len,
                                uint32_t *out_mask,
                                int64_t *out_k);

/**
 * Plans a route between 0-based node indices.
 *
 * # Safety
 * `out` must be valid; the handle must be released with [`hr_route_free`].
 */
enum HrStatus hr_route_plan(uint32_t d, size_t source, size_t target, struct HrRoute **out);

/**
 * # Safety
 * `route` must be NULL or a handle from [`hr_route_plan`] not yet freed.
 */
void hr_route_free(struct HrRoute *route);

/**
 * # Safety
 * `route` must be NULL or a live handle.
 */
size_t hr_route_step_count(const struct HrRoute *route);

/**
 * Total duration (a multiple of pi/2); negative for NULL.
 *
 * # Safety
 * `route` must be NULL or a live handle.
 */
double hr_route_duration(const struct HrRoute *route);

/**
 * Dressing level and 1-based dressed coordinates of step `index`.
 *
 * # Safety
 * `coords` must hold `cap` writable `u32`s; other outputs must be valid.
 */
enum HrStatus hr_route_step(const struct HrRoute *route,
                            size_t index,
                            uint32_t *out_l,
                            uint32_t *coords,
                            size_t cap,
                            size_t *out_len);

/**
 * Executes the plan and reports the probability found at the target.
 *
 * # Safety
 * `route` must be a live handle and `out_fidelity` a valid pointer.
 */
enum HrStatus hr_route_execute(const struct HrRoute *route, double *out_fidelity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERROUTE_H */
