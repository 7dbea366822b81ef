/* isoclass: random-model statistics for symplectic finite abelian p-groups.
 *
 * C interface to the isoclass core.  All heavy calls take a JSON request and
 * return a JSON report; returned strings are heap-allocated and must be
 * released with isx_free().  A session owns the symplectic-automorphism
 * order cache; the environment variable ISOCLASS_CACHE overrides its on-disk
 * location.  Reports are byte-identical for identical (request, seed) pairs
 * regardless of the thread count.
 */
#ifndef ISOCLASS_H
#define ISOCLASS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct isx_session isx_session;

enum isx_status {
    ISX_OK = 0,
    ISX_ERR_USAGE = 1,      /* malformed request, bad parameters, parity violations */
    ISX_ERR_TOO_LARGE = 2,  /* enumeration or precision guard exceeded */
    ISX_ERR_PRECISION = 3,  /* unresolved at the truncation boundary */
    ISX_ERR_SINGULAR = 4,   /* singular matrix where nonsingular required */
    ISX_ERR_STAT_TEST = 5,  /* a statistical self-check failed */
    ISX_ERR_INTERNAL = 6
};

const char* isx_version(void);

isx_session* isx_session_new(void);
void isx_session_free(isx_session* s);

/* Last error message of a failed call on this session. */
const char* isx_last_error(const isx_session* s);

/* Path of the persistent order cache; path = NULL or "" disables it. */
int isx_session_set_cache_path(isx_session* s, const char* path);
const char* isx_session_cache_path(const isx_session* s);
int isx_cache_clear(isx_session* s);

/* Run one experiment (or a sweep when the config carries n_list).
 * config_json is a flat object: kind, p, E, E_cap, n, r, m, s, e, e_list,
 * primes, n_list, trials, seed, threads.  *report_json gets the run report. */
int isx_run(isx_session* s, const char* config_json, char** report_json);

/* Evaluate a closed-form quantity.  query_json: {"op": ..., parameters...};
 * ops: gl_alt_ratio, euler_alt, sp_order, w_weight, w_sum, pi_finite,
 * pi_limit, stratum_finite, igusa, ogr_count, moment_finite, moment_limit,
 * count_injections, prob_same_pairing, prob_nonzero_t, schubert_dim,
 * stratum_dim.  Exact values carry "rational"; floats carry "value" and a
 * certified "tail" bound where applicable. */
int isx_theory(isx_session* s, const char* query_json, char** result_json);

/* Exact enumeration self-checks.  ISX_OK when every check passes,
 * ISX_ERR_STAT_TEST otherwise; the JSON report lists each check. */
int isx_selftest(isx_session* s, char** report_json);

/* Enumerate maximal isotropic direct summands of (Z/p^e)^{2n}.  The report
 * carries the count and, when include_list is nonzero, each summand's
 * canonical basis columns. */
int isx_enumerate_ogr(isx_session* s, uint32_t n, uint64_t p, uint32_t e,
                      int include_list, char** report_json);

void isx_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ISOCLASS_H */
