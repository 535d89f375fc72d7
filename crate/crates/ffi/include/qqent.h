#ifndef QQENT_H
#define QQENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QqStatus {
  QQ_STATUS_OK = 0,
  QQ_STATUS_NULL_POINTER = 1,
  // Input failed validation (spectrum, entanglement range, matrix shape, ...).
  QQ_STATUS_INVALID_INPUT = 2,
  // The state lacks the structural form the operation needs.
  QQ_STATUS_FORM_PRECONDITION = 3,
  QQ_STATUS_BUFFER_TOO_SMALL = 4,
  // A Rust panic was caught at the boundary.
  QQ_STATUS_INTERNAL = 5,
} QqStatus;

// Opaque density matrix handle.
typedef struct QqState QqState;

// Scalar results of a Lewenstein-Sanpera decomposition, plus ρ_E and ρ_S as
// interleaved row-major matrices of side `dim` (at most 6).
typedef struct QqLsResult {
  double p_e;
  double xi[4];
  // Entanglement of the pure part ρ_E.
  double e_rho_e;
  // Reconstruction error, |p_E·E(ρ_E) − max{0, ξ₁−ξ₂−ξ₃−ξ₄}|, negativity of ρ_S.
  double residuals[3];
  size_t dim;
  double rho_e[72];
  double rho_s[72];
} QqLsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never null.
const char *qq_status_message(enum QqStatus status);

// Message of the last failure on this thread, or null. Valid until the next failing call.
const char *qq_last_error(void);

// Build a state from `2·dim²` interleaved doubles with dim = n1·n2.
//
// # Safety
// `data` must point to `2·(n1·n2)²` readable doubles; `out` must be writable.
enum QqStatus qq_state_from_matrix(const double *data, size_t n1, size_t n2, struct QqState **out);

// # Safety
// `state` must come from this library and not be freed twice. Null is ignored.
void qq_state_free(struct QqState *state);

// Side length of the matrix, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t qq_state_dim(const struct QqState *state);

// Copy the matrix into `out` (needs `2·dim²` doubles).
//
// # Safety
// `state` must be a live handle; `out` must hold `len` writable doubles.
enum QqStatus qq_state_matrix(const struct QqState *state, double *out, size_t len);

// # Safety
// `spectrum` must point to 6 doubles; `out` must be writable.
enum QqStatus qq_build_epu_min_tgx(const double *spectrum, double e, struct QqState **out);

// # Safety
// `spectrum` must point to 6 doubles; `out` must be writable.
enum QqStatus qq_build_mems(const double *spectrum, struct QqState **out);

// # Safety
// `spectrum` must point to 6 doubles; `out` must be writable.
enum QqStatus qq_build_alpha_beta(const double *spectrum,
                                  double alpha,
                                  double beta,
                                  struct QqState **out);

// λ₁ − λ₅ − 2√(λ₄λ₆), unclipped.
//
// # Safety
// `spectrum` must point to 6 doubles; `out` must be writable.
enum QqStatus qq_e_mems(const double *spectrum, double *out);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum QqStatus qq_min_tgx_i_concurrence(const struct QqState *state, double *out);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum QqStatus qq_min_sgx_i_concurrence(const struct QqState *state, double *out);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum QqStatus qq_negativity(const struct QqState *state, double *out);

// Quartet concurrences in the order {1,2,4,5}, {1,3,4,6}, {2,3,5,6}.
//
// # Safety
// `state` must be a live handle; `out` must hold 3 writable doubles.
enum QqStatus qq_subspace_concurrences(const struct QqState *state, double *out);

// Closed-form decomposition of the EPU-minimal TGX state of (λ, E).
//
// # Safety
// `spectrum` must point to 6 doubles; `out` must be writable.
enum QqStatus qq_ls_explicit(const double *spectrum, double e, struct QqLsResult *out);

// Numeric decomposition of a minimal SGX (or 2×2) state.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum QqStatus qq_ls_numeric(const struct QqState *state, struct QqLsResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QQENT_H */
