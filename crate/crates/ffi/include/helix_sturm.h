#ifndef HELIX_STURM_H
#define HELIX_STURM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_INVALID_DOMAIN = 3,
  HS_STATUS_NON_FINITE_POTENTIAL = 4,
  HS_STATUS_CONVERGENCE_FAILURE = 5,
  HS_STATUS_BUFFER_TOO_SMALL = 6,
  HS_STATUS_PANIC = 7,
} HsStatus;

typedef enum HsModel {
  HS_MODEL_FREE = 0,
  HS_MODEL_CORNELL = 1,
  HS_MODEL_KRATZER = 2,
  HS_MODEL_MORSE_SMALL = 3,
} HsModel;

typedef enum HsParam {
  HS_PARAM_OMEGA = 0,
  HS_PARAM_B0 = 1,
  HS_PARAM_PHI_B = 2,
  HS_PARAM_CORNELL_A = 3,
  HS_PARAM_CORNELL_B = 4,
  HS_PARAM_KRATZER_A = 5,
  HS_PARAM_KRATZER_D = 6,
  HS_PARAM_MORSE_D = 7,
  HS_PARAM_MORSE_A = 8,
  HS_PARAM_MORSE_R0 = 9,
} HsParam;

/**
 * Opaque problem definition.
 */
typedef struct HsProblem HsProblem;

/**
 * Opaque solver result.
 */
typedef struct HsSpectrum HsSpectrum;

/**
 * Background constants, mirrored field for field.
 */
typedef struct HsPhysics {
  double hbar;
  double mu;
  double e;
  double k;
  double omega;
  double b0;
  double phi_b;
} HsPhysics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hs_version(void);

/**
 * New problem with default physics and grid. Model parameters start at
 * Cornell (1, 0.02), Kratzer (1, 1), Morse (1, 0.3, 5).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HsStatus hs_problem_new(enum HsModel kind, int32_t m, size_t levels, struct HsProblem **out);

/**
 * # Safety
 * `p` must be NULL or a handle from `hs_problem_new` not yet freed.
 */
void hs_problem_free(struct HsProblem *p);

/**
 * # Safety
 * `p` must be a live problem handle.
 */
enum HsStatus hs_problem_set_grid(struct HsProblem *p,
                                  double r_min,
                                  double r_max,
                                  size_t n_intervals);

/**
 * # Safety
 * `p` must be a live problem handle and `physics` a valid pointer.
 */
enum HsStatus hs_problem_set_physics(struct HsProblem *p, const struct HsPhysics *physics);

/**
 * # Safety
 * `p` must be a live problem handle.
 */
enum HsStatus hs_problem_set_param(struct HsProblem *p, enum HsParam param, double value);

/**
 * # Safety
 * `p` must be a live problem handle.
 */
enum HsStatus hs_problem_set_m(struct HsProblem *p, int32_t m);

/**
 * # Safety
 * `p` must be a live problem handle.
 */
enum HsStatus hs_problem_set_tolerances(struct HsProblem *p,
                                        double tol_lambda,
                                        double tol_residual,
                                        size_t max_iterations);

/**
 * Effective potential `V_eff(r)` of the problem.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum HsStatus hs_v_eff(const struct HsProblem *p, double r, double *out);

/**
 * Solves for the requested levels.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum HsStatus hs_solve(const struct HsProblem *p, struct HsSpectrum **out);

/**
 * # Safety
 * `s` must be NULL or a handle from `hs_solve` not yet freed.
 */
void hs_spectrum_free(struct HsSpectrum *s);

/**
 * Number of levels held. Returns 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live spectrum handle.
 */
size_t hs_spectrum_levels(const struct HsSpectrum *s);

/**
 * Number of grid nodes, boundaries included. Returns 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live spectrum handle.
 */
size_t hs_spectrum_nodes(const struct HsSpectrum *s);

/**
 * `λ_n` and `E_n` of level `n`. Either output may be NULL.
 *
 * # Safety
 * `s` must be a live spectrum handle; non-NULL outputs must be valid.
 */
enum HsStatus hs_spectrum_level(const struct HsSpectrum *s,
                                size_t n,
                                double *lambda,
                                double *energy);

/**
 * Copies the grid nodes (`hs_spectrum_nodes` values) into `buf`.
 *
 * # Safety
 * `s` must be a live spectrum handle and `buf` valid for `len` writes.
 */
enum HsStatus hs_spectrum_copy_grid(const struct HsSpectrum *s, double *buf, size_t len);

/**
 * Copies the normalized `f_n` on all nodes (zero at both ends) into `buf`.
 *
 * # Safety
 * `s` must be a live spectrum handle and `buf` valid for `len` writes.
 */
enum HsStatus hs_spectrum_copy_function(const struct HsSpectrum *s,
                                        size_t n,
                                        double *buf,
                                        size_t len);

/**
 * Node count of `f_n`.
 *
 * # Safety
 * `s` must be a live spectrum handle and `out` a valid pointer.
 */
enum HsStatus hs_spectrum_node_count(const struct HsSpectrum *s, size_t n, size_t *out);

/**
 * `∂λ_n/∂p` from the eigenvector.
 *
 * # Safety
 * `s` must be a live spectrum handle and `out` a valid pointer.
 */
enum HsStatus hs_spectrum_dlambda(const struct HsSpectrum *s,
                                  size_t n,
                                  enum HsParam param,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELIX_STURM_H */
