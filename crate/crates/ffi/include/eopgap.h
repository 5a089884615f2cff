#ifndef EOPGAP_H
#define EOPGAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum EopgapStatus {
  EOPGAP_STATUS_OK = 0,
  EOPGAP_STATUS_NULL_POINTER = 1,
  EOPGAP_STATUS_INVALID_ARGUMENT = 2,
  EOPGAP_STATUS_PARSE = 3,
  EOPGAP_STATUS_VERSION = 4,
  EOPGAP_STATUS_CAPACITY = 5,
  EOPGAP_STATUS_INTERNAL = 6,
  EOPGAP_STATUS_IO = 7,
  EOPGAP_STATUS_PANIC = 8,
} EopgapStatus;

/**
 * A pure state or a density operator.
 */
typedef struct EopgapState EopgapState;

typedef struct EopgapTableau EopgapTableau;

/**
 * Fidelity bound of the local Petz recovery.
 */
typedef struct EopgapRecovery {
  double fidelity;
  double minus_two_log_f;
  double g_estimate;
  bool bound_satisfied;
} EopgapRecovery;

/**
 * Canonical counts of a tripartite stabilizer state.
 */
typedef struct EopgapCounts {
  size_t local_a;
  size_t local_b;
  size_t local_c;
  size_t e_ab;
  size_t e_bc;
  size_t e_ac;
  size_t g;
} EopgapCounts;

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length, or 0
 * if there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t eopgap_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eopgap_version(void);

/**
 * Parses a JSON state file or a tableau text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EopgapStatus eopgap_state_parse(const char *text, struct EopgapState **out);

/**
 * Pure state on parties `A, B, …` with the given dimensions; `amplitudes`
 * holds `2·Π dims` reals, real and imaginary parts interleaved.
 *
 * # Safety
 * `dims` must point to `n_parties` values and `amplitudes` to `len` values.
 */
enum EopgapStatus eopgap_state_pure_new(const size_t *dims,
                                        size_t n_parties,
                                        const double *amplitudes,
                                        size_t len,
                                        struct EopgapState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library, not yet freed.
 */
void eopgap_state_free(struct EopgapState *state);

/**
 * Von Neumann entropy (nats) of a region such as `"A,B"`.
 *
 * # Safety
 * Pointers must be valid; `region` NUL-terminated.
 */
enum EopgapStatus eopgap_state_entropy(const struct EopgapState *state,
                                       const char *region,
                                       double *out);

/**
 * `E_p(a : b)` and the gap `2E_p − I(a:b)` of the marginal on `a ∪ b`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum EopgapStatus eopgap_eop_bipartite(const struct EopgapState *state,
                                       const char *a,
                                       const char *b,
                                       size_t restarts,
                                       uint64_t seed,
                                       double *eop_out,
                                       double *gap_out);

/**
 * Generalized gap `g(α)` for `alpha` such as `"A;B;C"`; density inputs
 * are purified canonically.
 *
 * # Safety
 * Pointers must be valid; `alpha` NUL-terminated.
 */
enum EopgapStatus eopgap_generalized_gap(const struct EopgapState *state,
                                         const char *alpha,
                                         size_t restarts,
                                         uint64_t seed,
                                         double *gap_out);

/**
 * Local Petz recovery at the optimizer's best partition for `alpha`.
 *
 * # Safety
 * Pointers must be valid; `alpha` NUL-terminated.
 */
enum EopgapStatus eopgap_recovery_bound(const struct EopgapState *state,
                                        const char *alpha,
                                        size_t restarts,
                                        uint64_t seed,
                                        struct EopgapRecovery *out);

/**
 * Parses tableau text (`n=…` header, one Pauli string per line).
 *
 * # Safety
 * `text` must be NUL-terminated and `out` valid.
 */
enum EopgapStatus eopgap_tableau_parse(const char *text, struct EopgapTableau **out);

/**
 * Uniformly random `n`-qubit stabilizer state.
 *
 * # Safety
 * `out` must be valid.
 */
enum EopgapStatus eopgap_tableau_random(size_t n_qubits, uint64_t seed, struct EopgapTableau **out);

/**
 * # Safety
 * `tab` must be null or a handle from this library, not yet freed.
 */
void eopgap_tableau_free(struct EopgapTableau *tab);

/**
 * Entropy in bits of the qubits `qubits[0..len]`.
 *
 * # Safety
 * `tab` and `out` must be valid; `qubits` must point to `len` values.
 */
enum EopgapStatus eopgap_tableau_entropy_bits(const struct EopgapTableau *tab,
                                              const size_t *qubits,
                                              size_t len,
                                              size_t *out);

/**
 * Canonical counts for the qubit partition `(a, b, c)`.
 *
 * # Safety
 * `tab` and `out` must be valid; each array must hold its stated length.
 */
enum EopgapStatus eopgap_tableau_counts(const struct EopgapTableau *tab,
                                        const size_t *a,
                                        size_t na,
                                        const size_t *b,
                                        size_t nb,
                                        const size_t *c,
                                        size_t nc,
                                        struct EopgapCounts *out);

#endif  /* EOPGAP_H */
