/* C interface to the qcx hybrid quantum-classical chemistry library. */

#ifndef QCX_H
#define QCX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum QcxStatus {
  QCX_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  QCX_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  QCX_STATUS_INVALID_UTF8 = 2,
  /*
   Hamiltonian or kernel text failed to parse.
   */
  QCX_STATUS_PARSE_ERROR = 3,
  /*
   An argument was out of range or inconsistent.
   */
  QCX_STATUS_INVALID_ARGUMENT = 4,
  /*
   The simulator rejected the circuit.
   */
  QCX_STATUS_BACKEND_ERROR = 5,
  /*
   An algorithm or optimizer failed.
   */
  QCX_STATUS_ALGORITHM_ERROR = 6,
  /*
   An output buffer was too small; the required length was written.
   */
  QCX_STATUS_BUFFER_TOO_SMALL = 7,
  /*
   A Rust panic was caught at the boundary.
   */
  QCX_STATUS_PANIC = 99,
} QcxStatus;

/*
 Opaque circuit, possibly with free variables.
 */
typedef struct QcxCircuit QcxCircuit;

/*
 Opaque Pauli-sum observable.
 */
typedef struct QcxObservable QcxObservable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string. Do not free.
 */
const char *qcx_version(void);

/*
 Message of the last failed call on this thread, or NULL if none. The
 caller frees the copy with [`qcx_string_free`].
 */
char *qcx_last_error_message(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void qcx_string_free(char *s);

/*
 Parses a Hamiltonian in the text format (one `coef [P<q>]*` term per
 line) into `*out`.

 # Safety
 `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QcxStatus qcx_observable_parse(const char *text, struct QcxObservable **out);

/*
 Number of qubits the observable acts on.

 # Safety
 `obs` must be a live handle and `out` a writable pointer.
 */
enum QcxStatus qcx_observable_n_qubits(const struct QcxObservable *obs, size_t *out);

/*
 Number of Pauli terms in the observable.

 # Safety
 `obs` must be a live handle and `out` a writable pointer.
 */
enum QcxStatus qcx_observable_n_terms(const struct QcxObservable *obs, size_t *out);

/*
 Text form of the observable, or NULL for a null handle.

 # Safety
 `obs` must be a live handle or NULL.
 */
char *qcx_observable_to_string(const struct QcxObservable *obs);

/*
 Releases an observable. NULL is ignored.

 # Safety
 `obs` must come from this library and not have been freed already.
 */
void qcx_observable_free(struct QcxObservable *obs);

/*
 Parses kernel source (`__qpu__ void name(qbit q, double t) { ... }` or
 the line form starting `kernel name(t)`) into `*out`.

 # Safety
 `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QcxStatus qcx_circuit_parse(const char *source, struct QcxCircuit **out);

/*
 Closed-shell Hartree-Fock preparation for `ne` electrons in `nq`
 spin-orbitals.

 # Safety
 `out` must be a writable pointer.
 */
enum QcxStatus qcx_hf_circuit(size_t ne, size_t nq, struct QcxCircuit **out);

/*
 UCCSD ansatz on top of the Hartree-Fock state, one variable per
 excitation.

 # Safety
 `out` must be a writable pointer.
 */
enum QcxStatus qcx_uccsd_circuit(size_t ne, size_t nq, struct QcxCircuit **out);

/*
 Number of qubits the circuit touches.

 # Safety
 `circuit` must be a live handle and `out` a writable pointer.
 */
enum QcxStatus qcx_circuit_n_qubits(const struct QcxCircuit *circuit, size_t *out);

/*
 Number of free variables, i.e. the parameter count expected by
 [`qcx_expectation`] and produced by [`qcx_vqe`].

 # Safety
 `circuit` must be a live handle and `out` a writable pointer.
 */
enum QcxStatus qcx_circuit_n_variables(const struct QcxCircuit *circuit, size_t *out);

/*
 Number of gates after flattening.

 # Safety
 `circuit` must be a live handle and `out` a writable pointer.
 */
enum QcxStatus qcx_circuit_n_instructions(const struct QcxCircuit *circuit, size_t *out);

/*
 Line-form text of the circuit, readable by [`qcx_circuit_parse`], or
 NULL for a null handle.

 # Safety
 `circuit` must be a live handle or NULL.
 */
char *qcx_circuit_to_string(const struct QcxCircuit *circuit);

/*
 Releases a circuit. NULL is ignored.

 # Safety
 `circuit` must come from this library and not have been freed already.
 */
void qcx_circuit_free(struct QcxCircuit *circuit);

/*
 `<psi(params)| obs |psi(params)>` for the circuit with its variables
 bound to `params` (in declaration order). `shots = 0` evaluates exactly;
 otherwise each term is estimated from `shots` samples drawn with `seed`.

 # Safety
 Handles must be live, `params` must hold `n_params` values (it may be
 NULL when `n_params` is 0) and `out` must be writable.
 */
enum QcxStatus qcx_expectation(const struct QcxObservable *obs,
                               const struct QcxCircuit *circuit,
                               const double *params,
                               size_t n_params,
                               int64_t shots,
                               uint64_t seed,
                               double *out);

/*
 Minimizes `<obs>` over the circuit's variables with the named optimizer
 (`"nelder-mead"` when NULL), starting from zeros.

 Writes the minimum to `*energy`, the variable count to `*n_params` and,
 if `params_capacity` is large enough, the optimal parameters to
 `params`. Returns `QCX_STATUS_BUFFER_TOO_SMALL` (after writing `*energy`
 and `*n_params`) when it is not.

 # Safety
 Handles must be live, `optimizer` NULL or NUL-terminated, `params` must
 have room for `params_capacity` values (or be NULL when that is 0), and
 `energy`, `n_params` must be writable.
 */
enum QcxStatus qcx_vqe(const struct QcxObservable *obs,
                       const struct QcxCircuit *circuit,
                       const char *optimizer,
                       int64_t shots,
                       uint64_t seed,
                       double *energy,
                       double *params,
                       size_t params_capacity,
                       size_t *n_params);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCX_H */
