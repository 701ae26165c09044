/* qpolar C API: polar coding workbench for binary-input classical-quantum
 * channels behind an opaque-handle, error-code interface.
 *
 * Every function returning int yields QPOLAR_OK on success or one of the
 * error codes below; qpolar_last_error() describes the most recent failure
 * on the calling thread. Strings returned through char** out-parameters are
 * heap-allocated and must be released with qpolar_free().
 */
#ifndef QPOLAR_H
#define QPOLAR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define QPOLAR_OK 0
#define QPOLAR_EINVAL 2    /* malformed input or argument out of range */
#define QPOLAR_ERESOURCE 3 /* requested computation exceeds the exact-mode caps */
#define QPOLAR_EPROPERTY 4 /* a verification suite reported a failing check */
#define QPOLAR_EINTERNAL 5

/* Opaque handle for a channel family instance, created from the JSON spec
 * {"family": "...", "parameter": x, "clones": k?, "dephasing_axis": "Z"?}. */
typedef struct qpolar_channel qpolar_channel;

int qpolar_channel_open(const char* spec_json, qpolar_channel** out);
void qpolar_channel_close(qpolar_channel* ch);

/* Normalized spec JSON; owned by the handle, valid until close. */
const char* qpolar_channel_spec(const qpolar_channel* ch);

/* Holevo quantities, fidelities, coherent information, environment
 * commutator norm and the degradable-range flag, as a JSON object. */
int qpolar_channel_info(const qpolar_channel* ch, char** json_out);

/* Synthesized-channel trajectory at level n: CSV table plus a JSON summary
 * with the good/poor/undecided fractions. mode: "auto", "exact", "bounds". */
int qpolar_polarize(const qpolar_channel* ch, int n, double beta, const char* mode,
                    char** csv_out, char** summary_json_out);

/* Four-set wiretap partition against the channel's complement (or against
 * the Bob marginal of eve_spec_json when given): CSV table plus the security
 * report JSON. */
int qpolar_partition(const qpolar_channel* ch, const char* eve_spec_json, int n, double beta,
                     uint64_t seed, const char* mode, char** csv_out, char** report_json_out);

/* Monte Carlo decoding or one coherent protocol run.
 * mode: "classical_sc", "quantum_sc" (per-trial CSV + JSON summary) or
 * "coherent" (JSON trace only; csv_out receives an empty string). */
int qpolar_simulate(const qpolar_channel* ch, const char* mode, int n, double beta,
                    int64_t trials, uint64_t seed, char** csv_out, char** summary_json_out);

/* Capacity-to-coherent-information ratio curve over a parameter grid. */
int qpolar_capacity(const char* family, const double* grid, size_t grid_len, char** csv_out);

/* Property suite: "appendix_a", "appendix_b", "lemma1", "conservation".
 * Returns QPOLAR_EPROPERTY (with the report still populated) when a check
 * fails. */
int qpolar_verify(const char* suite, uint64_t seed, char** report_json_out);

void qpolar_free(char* buf);
const char* qpolar_last_error(void);
const char* qpolar_version(void);

#ifdef __cplusplus
}
#endif

#endif /* QPOLAR_H */
