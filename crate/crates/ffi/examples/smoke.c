/* Parses the two-qubit H2 Hamiltonian and a pair-rotation kernel, runs
   VQE and prints the energy and parameter. */
#include <stdio.h>
#include "qcx.h"

static const char *HAMILTONIAN =
    "0.2976\n0.3593 Z0\n-0.4826 Z1\n0.5818 Z0 Z1\n0.0896 X0 X1\n0.0896 Y0 Y1\n";
static const char *KERNEL =
    "__qpu__ void ansatz(qbit q, double t0) { X(q[0]); Ry(q[1], t0); CNOT(q[1], q[0]); }";

static int report(QcxStatus s) {
    char *msg = qcx_last_error_message();
    fprintf(stderr, "qcx status %d: %s\n", (int)s, msg ? msg : "(none)");
    qcx_string_free(msg);
    return 1;
}

int main(void) {
    QcxObservable *h = NULL;
    QcxCircuit *ansatz = NULL;
    QcxStatus s;
    if ((s = qcx_observable_parse(HAMILTONIAN, &h)) != QCX_STATUS_OK) return report(s);
    if ((s = qcx_circuit_parse(KERNEL, &ansatz)) != QCX_STATUS_OK) return report(s);

    double energy = 0.0, theta = 0.0;
    size_t n = 0;
    s = qcx_vqe(h, ansatz, "nelder-mead", 0, 0, &energy, &theta, 1, &n);
    if (s != QCX_STATUS_OK) return report(s);
    printf("energy %.8f params %zu theta %.6f\n", energy, n, theta);

    /* A malformed kernel reports its position. */
    QcxCircuit *bad = NULL;
    s = qcx_circuit_parse("__qpu__ void k(qbit q) { Foo(q[0]); }", &bad);
    char *msg = qcx_last_error_message();
    printf("status %d: %s\n", (int)s, msg);
    qcx_string_free(msg);

    qcx_circuit_free(ansatz);
    qcx_observable_free(h);
    return 0;
}
