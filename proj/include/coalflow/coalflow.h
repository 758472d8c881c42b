/* coalflow — coalescing stochastic flow simulation laboratory.
 *
 * C interface to the simulation core: opaque handles, status codes, and
 * per-thread error messages.  Experiment runs return an opaque handle that
 * carries a JSON summary plus zero or more named text documents (CSV tables)
 * ready to be written to disk; all content is deterministic given the seed,
 * whatever the thread count.
 */
#ifndef COALFLOW_H
#define COALFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COALFLOW_BUILDING_SHARED)
#    define COALFLOW_API __declspec(dllexport)
#  else
#    define COALFLOW_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define COALFLOW_API __attribute__((visibility("default")))
#else
#  define COALFLOW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coalflow_status {
  COALFLOW_OK = 0,
  COALFLOW_ERR_INVALID_ARGUMENT = 1,
  COALFLOW_ERR_RUNTIME = 2,
  COALFLOW_ERR_NO_MEMORY = 3
} coalflow_status;

/* Library version string, e.g. "0.1.0". */
COALFLOW_API const char* coalflow_version(void);

/* Message for the most recent failure on this thread; empty string if none.
 * Valid until the next coalflow call on the same thread. */
COALFLOW_API const char* coalflow_last_error(void);

/* ---- drift models ------------------------------------------------------ */

typedef struct coalflow_drift coalflow_drift;

/* kind: "zero" | "linear" | "cosine" | "scaled-tanh".  linear and
 * scaled-tanh take one parameter. */
COALFLOW_API coalflow_status coalflow_drift_create(const char* kind,
                                                   const double* params,
                                                   size_t n_params,
                                                   coalflow_drift** out);
COALFLOW_API void coalflow_drift_destroy(coalflow_drift* drift);
COALFLOW_API coalflow_status coalflow_drift_eval(const coalflow_drift* drift,
                                                 double u, double* out);
COALFLOW_API coalflow_status coalflow_drift_lipschitz(
    const coalflow_drift* drift, double* out);

/* ---- closed-form oracles ------------------------------------------------ */

COALFLOW_API coalflow_status coalflow_oracle_phi_c(double c, double t,
                                                   double* out);
COALFLOW_API coalflow_status coalflow_oracle_meeting_survival_linear(
    double c, double u1, double u2, double t, double* out);
COALFLOW_API coalflow_status coalflow_oracle_meeting_never_prob_linear(
    double c, double u1, double u2, double* out);
COALFLOW_API coalflow_status coalflow_oracle_l_defect(double t, double u,
                                                      double* out);
COALFLOW_API coalflow_status coalflow_oracle_l_upper_bound(double t, double u,
                                                           double* out);
COALFLOW_API coalflow_status coalflow_oracle_expected_cluster_size_linear(
    double c, double t, double* out);
COALFLOW_API coalflow_status coalflow_oracle_normal_cdf(double x, double* out);

/* ---- experiment runs ---------------------------------------------------- */

typedef struct coalflow_run coalflow_run;

/* JSON text describing the run's results. */
COALFLOW_API const char* coalflow_run_summary(const coalflow_run* run);
COALFLOW_API size_t coalflow_run_document_count(const coalflow_run* run);
COALFLOW_API const char* coalflow_run_document_name(const coalflow_run* run,
                                                    size_t index);
COALFLOW_API const char* coalflow_run_document_content(const coalflow_run* run,
                                                       size_t index);
COALFLOW_API void coalflow_run_destroy(coalflow_run* run);

/* Pairwise first-meeting experiment; emits the samples CSV and a summary
 * with the meet probability, oracle comparison and conditioned KS where a
 * closed form exists, plus empirical survival at the requested times. */
COALFLOW_API coalflow_status coalflow_run_meet(
    const coalflow_drift* drift, double u1, double u2, double horizon,
    double dt, const double* survival_times, size_t n_survival_times,
    uint64_t reps, uint64_t seed, int threads, coalflow_run** out);

/* Cluster-size estimates at each t.  dt <= 0 selects the per-t default
 * t/400.  method: "pair-quadrature" | "fan". */
COALFLOW_API coalflow_status coalflow_run_cluster(
    const coalflow_drift* drift, const double* ts, size_t n_ts, int grid_m,
    uint64_t reps_per_node, double dt, const char* method, uint64_t seed,
    int threads, coalflow_run** out);

/* Single-replica fractional-step record (CSV of the paths, jumps and
 * martingale part). */
COALFLOW_API coalflow_status coalflow_run_trotter_record(
    const coalflow_drift* drift, const double* starts, size_t n_starts,
    int partition_n, double dt, uint64_t seed, coalflow_run** out);

/* Two-sample comparison of fractional-step vs direct terminal positions per
 * partition size. */
COALFLOW_API coalflow_status coalflow_run_trotter_compare(
    const coalflow_drift* drift, double u1, double u2, const int* ns,
    size_t n_ns, double dt, uint64_t reps, uint64_t seed, int threads,
    coalflow_run** out);

/* Jump-bound / martingale-part diagnostics over replicas. */
COALFLOW_API coalflow_status coalflow_run_trotter_diagnostics(
    const coalflow_drift* drift, const double* starts, size_t n_starts,
    int partition_n, double dt, uint64_t reps, uint64_t seed, int threads,
    coalflow_run** out);

/* Correlation-decay sum estimate for each n. */
COALFLOW_API coalflow_status coalflow_run_prop1(
    const int* ns, size_t n_ns, double r, double s, double t, uint64_t reps,
    double dt, uint64_t seed, int threads, coalflow_run** out);

/* Pathwise sandwich experiment; also reports the built-in zero-Lipschitz
 * bitwise equality check. */
COALFLOW_API coalflow_status coalflow_run_sandwich(
    const coalflow_drift* drift, double u1, double u2, double gamma,
    double horizon, double dt, uint64_t reps, uint64_t seed, int threads,
    coalflow_run** out);

/* Web invariant battery: oracle self-consistency, product moment vs l(1,1),
 * martingale mean, bitwise composition, non-crossing. */
COALFLOW_API coalflow_status coalflow_run_webtest(double dt, uint64_t reps,
                                                  uint64_t seed, int threads,
                                                  coalflow_run** out);

/* Coalescing-path record for births at time 0 (CSV paths + merge events). */
COALFLOW_API coalflow_status coalflow_run_web_record(
    const double* starts, size_t n_starts, double horizon, double dt,
    uint64_t seed, coalflow_run** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COALFLOW_H */
