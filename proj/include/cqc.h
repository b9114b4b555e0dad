#ifndef CQC_H
#define CQC_H

/* C interface to the compressed-quantum-circuit library. All functions
 * return a cqc_status; on failure, cqc_last_error() describes the problem
 * for the calling thread. Handles are opaque and owned by the caller. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cqc_status {
  CQC_OK = 0,
  CQC_ERR_INVALID_ARG = 1,  /* null pointer / bad buffer size */
  CQC_ERR_DIMENSION = 2,    /* shape mismatch */
  CQC_ERR_DOMAIN = 3,       /* value outside the mathematical domain */
  CQC_ERR_NUMERICAL = 4,    /* numerical procedure failed */
  CQC_ERR_RESOURCE = 5,     /* file or size budget problem */
  CQC_ERR_CONVERGENCE = 6,  /* iteration limit hit */
  CQC_ERR_PARSE = 7,        /* malformed config or circuit file */
  CQC_ERR_UNKNOWN = 8
} cqc_status;

typedef struct cqc_circuit cqc_circuit;

/* Library semantic version, e.g. "1.0.0". Never returns NULL. */
const char* cqc_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
const char* cqc_last_error(void);

/* Runs one experiment described by a JSON config document (see the config
 * schema in the README) and writes its CSV/JSON artifacts into out_dir. */
cqc_status cqc_run_experiment(const char* config_json, const char* out_dir);

/* Circuit handles -------------------------------------------------------- */

cqc_status cqc_circuit_load(const char* path, cqc_circuit** out);
cqc_status cqc_circuit_save(const cqc_circuit* c, const char* path);
void cqc_circuit_free(cqc_circuit* c);

cqc_status cqc_circuit_n_sites(const cqc_circuit* c, long* out);
cqc_status cqc_circuit_order(const cqc_circuit* c, long* out);

/* Depth under greedy scheduling (equals 2(M-1)+N-1 for the staircase). */
cqc_status cqc_circuit_depth(const cqc_circuit* c, long* out);

/* Independent real parameters of the ansatz. */
cqc_status cqc_circuit_parameter_count(const cqc_circuit* c, long* out);

/* Amplitudes of the prepared state as interleaved (re, im) doubles; len must
 * equal 2 * 2^N. Site 1 is the most significant bit of the index. */
cqc_status cqc_circuit_statevector(const cqc_circuit* c, double* out, long len);

/* Gauge-randomized variant preparing the same state (up to global phase). */
cqc_status cqc_circuit_randomize_gauge(const cqc_circuit* c,
                                       unsigned long long seed,
                                       cqc_circuit** out);

#ifdef __cplusplus
}
#endif

#endif
