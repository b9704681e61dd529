#ifndef TMNLCS_H
#define TMNLCS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `TMNLCS_STATUS_OK` is zero.
 */
typedef enum TmnlcsStatus {
  TMNLCS_STATUS_OK = 0,
  TMNLCS_STATUS_NULL_POINTER = 1,
  TMNLCS_STATUS_INVALID_ARGUMENT = 2,
  TMNLCS_STATUS_FUNCTION_DOMAIN = 3,
  TMNLCS_STATUS_FUNCTION_ZERO = 4,
  TMNLCS_STATUS_CONVERGENCE = 5,
  TMNLCS_STATUS_ZERO_STATE = 6,
  TMNLCS_STATUS_CHARGE_MISMATCH = 7,
  TMNLCS_STATUS_CHARGE_NEGATIVE = 8,
  TMNLCS_STATUS_UNKNOWN_NAME = 9,
  TMNLCS_STATUS_PARSE = 10,
  TMNLCS_STATUS_SCHEMA = 11,
  TMNLCS_STATUS_IO = 12,
  TMNLCS_STATUS_BUFFER_TOO_SMALL = 13,
  TMNLCS_STATUS_PANIC = 14,
} TmnlcsStatus;

/**
 * Construction route for `tmnlcs_state_build`.
 */
typedef enum TmnlcsRoute {
  TMNLCS_ROUTE_RECURSION = 0,
  TMNLCS_ROUTE_EXPONENTIAL = 1,
  /**
   * Perelomov closed form; kind must be `perelomov`.
   */
  TMNLCS_ROUTE_PERELOMOV_CLOSED = 2,
  /**
   * Two-component superposition; kind must be a parity kind.
   */
  TMNLCS_ROUTE_PARITY_SUPERPOSITION = 3,
} TmnlcsRoute;

/**
 * Opaque nonlinear-function handle.
 */
typedef struct TmnlcsFunction TmnlcsFunction;

/**
 * Opaque state handle.
 */
typedef struct TmnlcsState TmnlcsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *tmnlcs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tmnlcs_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void tmnlcs_string_free(char *s);

/**
 * Parses a catalog name or expression into a function handle. `q` fills in
 * the charge for a bare `perelomov_full`.
 */
enum TmnlcsStatus tmnlcs_function_parse(const char *text, uint32_t q, struct TmnlcsFunction **out);

void tmnlcs_function_free(struct TmnlcsFunction *f);

/**
 * Evaluates `f(na, nb)`.
 */
enum TmnlcsStatus tmnlcs_function_evaluate(const struct TmnlcsFunction *f,
                                           int64_t na,
                                           int64_t nb,
                                           double *out_re,
                                           double *out_im);

/**
 * Label of a function as a newly allocated string.
 */
enum TmnlcsStatus tmnlcs_function_label(const struct TmnlcsFunction *f, char **out);

/**
 * Builds a state with adaptive truncation.
 *
 * `kind` is `pair`, `perelomov`, `parity_pair`, `parity_perelomov` or
 * `custom`; `custom` needs `function`, the other kinds require it to be null.
 * For Perelomov kinds the eigenvalue is the squeeze parameter xi.
 */
enum TmnlcsStatus tmnlcs_state_build(const char *kind,
                                     const struct TmnlcsFunction *function,
                                     double eigenvalue_re,
                                     double eigenvalue_im,
                                     uint32_t q,
                                     enum TmnlcsRoute route,
                                     struct TmnlcsState **out);

/**
 * Wraps raw amplitudes (`2 * len` interleaved doubles) as a state.
 */
enum TmnlcsStatus tmnlcs_state_from_amplitudes(uint32_t q,
                                               const double *amplitudes,
                                               size_t len,
                                               struct TmnlcsState **out);

void tmnlcs_state_free(struct TmnlcsState *s);

enum TmnlcsStatus tmnlcs_state_clone(const struct TmnlcsState *s, struct TmnlcsState **out);

/**
 * Charge `q`, or 0 for a null handle.
 */
uint32_t tmnlcs_state_charge(const struct TmnlcsState *s);

/**
 * Number of amplitudes (`truncation_n + 1`), or 0 for a null handle.
 */
size_t tmnlcs_state_len(const struct TmnlcsState *s);

/**
 * Whether the truncation converged; false for a null handle.
 */
bool tmnlcs_state_converged(const struct TmnlcsState *s);

/**
 * Copies the amplitudes into `buf` as `re, im` pairs. `capacity` counts
 * doubles and must be at least `2 * tmnlcs_state_len(s)`.
 */
enum TmnlcsStatus tmnlcs_state_amplitudes(const struct TmnlcsState *s,
                                          double *buf,
                                          size_t capacity);

/**
 * Serializes a state to the JSON interchange format.
 */
enum TmnlcsStatus tmnlcs_state_to_json(const struct TmnlcsState *s, char **out);

enum TmnlcsStatus tmnlcs_state_from_json(const char *text, struct TmnlcsState **out);

/**
 * Applies `a†^m b†^n` and normalizes. If `out_function` is non-null it
 * receives the function the result is an eigenstate for.
 */
enum TmnlcsStatus tmnlcs_photon_add(const struct TmnlcsState *s,
                                    const struct TmnlcsFunction *f,
                                    uint32_t m,
                                    uint32_t n,
                                    struct TmnlcsState **out,
                                    struct TmnlcsFunction **out_function);

/**
 * Applies `a^m b^n` and normalizes; outputs as for `tmnlcs_photon_add`.
 */
enum TmnlcsStatus tmnlcs_photon_subtract(const struct TmnlcsState *s,
                                         const struct TmnlcsFunction *f,
                                         uint32_t m,
                                         uint32_t n,
                                         struct TmnlcsState **out,
                                         struct TmnlcsFunction **out_function);

/**
 * Kerr evolution `c_n -> exp(-i gamma_t n(n-1)) c_n`.
 */
enum TmnlcsStatus tmnlcs_kerr_evolve(const struct TmnlcsState *s,
                                     double gamma_t,
                                     struct TmnlcsState **out);

/**
 * `||f ab psi - alpha psi|| / max(|alpha|, 1)` over the interior rungs.
 */
enum TmnlcsStatus tmnlcs_eigen_residual(const struct TmnlcsState *s,
                                        const struct TmnlcsFunction *f,
                                        double alpha_re,
                                        double alpha_im,
                                        double *out);

/**
 * `|<s1|s2>|` for normalized inputs.
 */
enum TmnlcsStatus tmnlcs_fidelity(const struct TmnlcsState *s1,
                                  const struct TmnlcsState *s2,
                                  double *out);

/**
 * Photon statistics as a JSON object string.
 */
enum TmnlcsStatus tmnlcs_state_stats_json(const struct TmnlcsState *s, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TMNLCS_H */
