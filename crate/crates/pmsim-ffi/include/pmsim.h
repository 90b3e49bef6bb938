#ifndef PMSIM_H
#define PMSIM_H

/* Generated by cbindgen from the pmsim-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every FFI call.
typedef enum PmsimStatus {
  PMSIM_STATUS_OK = 0,
  PMSIM_STATUS_NULL_POINTER = 1,
  PMSIM_STATUS_INVALID_ARGUMENT = 2,
  PMSIM_STATUS_PARSE_ERROR = 3,
  PMSIM_STATUS_NUMERICAL_ERROR = 4,
  PMSIM_STATUS_INTERNAL_PANIC = 5,
} PmsimStatus;

// Opaque handle to a 3x3 observable square.
typedef struct PmsimSquare PmsimSquare;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// A static description of a status code.
const char *pmsim_status_message(enum PmsimStatus status);

// The canonical square; never fails. Free with [`pmsim_square_free`].
struct PmsimSquare *pmsim_square_standard(void);

// Parses a square from its text form (three token rows plus a sign row)
// and stores a new handle in `out`.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be valid for
// writes.
enum PmsimStatus pmsim_square_parse(const char *text, struct PmsimSquare **out);

// Releases a square handle. Null is ignored.
//
// # Safety
// `square` must have come from this library and not been freed before.
void pmsim_square_free(struct PmsimSquare *square);

// Writes true when every line of the square commutes pairwise and its
// product equals the line sign times the identity.
//
// # Safety
// Pointers must be valid as documented on the module.
enum PmsimStatus pmsim_square_verify(const struct PmsimSquare *square, bool *out_pass);

// Brute-forces the noncontextual maximum of beta over all 512 outcome
// assignments. `out_assignment` receives nine row-major values of +-1.
//
// # Safety
// `out_assignment` must be valid for writes of 9 elements.
enum PmsimStatus pmsim_square_nchv_max(const struct PmsimSquare *square,
                                       double *out_max,
                                       int8_t *out_assignment);

// The quantum value of beta for the square, evaluated on the maximally
// mixed two-qubit state (the value is state independent for a valid
// square).
//
// # Safety
// Pointers must be valid as documented on the module.
enum PmsimStatus pmsim_square_beta_quantum(const struct PmsimSquare *square, double *out_beta);

// eta = 1 - exp(-t/T2) for times in ms.
//
// # Safety
// `out_eta` must be valid for writes.
enum PmsimStatus pmsim_dephasing_eta(double t_ms, double t2_ms, double *out_eta);

// Runs the six-experiment probe suite on the maximally mixed system.
// `out_terms` receives the six corrected line correlations in the order
// r1, r2, r3, c1, c2, c3; `out_beta` the signed sum. With
// `epsilon_corrected` false the raw correlations are reported instead.
//
// # Safety
// `out_terms` must be valid for writes of 6 elements; `out_beta` for one.
enum PmsimStatus pmsim_suite_beta(double epsilon,
                                  bool epsilon_corrected,
                                  double *out_terms,
                                  double *out_beta);

// Epsilon-corrected beta of the suite with per-gate three-qubit
// dephasing: pulse length `t_ms`, dephasing time `t2_ms`, and `gates`
// channel applications per line.
//
// # Safety
// `out_beta` must be valid for writes.
enum PmsimStatus pmsim_noisy_suite_beta(double epsilon,
                                        double t_ms,
                                        double t2_ms,
                                        uint32_t gates,
                                        double *out_beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMSIM_H */
