/*
 * C interface to the sparse packetized predictive control library.
 *
 * Objects are opaque handles created by sppc_*_create functions and released
 * by the matching *_destroy. Every function returns an sppc_status; on failure
 * sppc_last_error() holds a message for the calling thread. Strings returned
 * through char** must be released with sppc_string_free. Matrices are dense,
 * row-major arrays of double.
 *
 * Handles are not synchronized: use one handle per thread, or serialize calls.
 */
#ifndef SPPC_H
#define SPPC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPPC_BUILDING_LIBRARY)
#    define SPPC_API __declspec(dllexport)
#  else
#    define SPPC_API __declspec(dllimport)
#  endif
#else
#  define SPPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1-3 double as the CLI exit codes. */
typedef enum sppc_status {
  SPPC_OK = 0,
  SPPC_ERROR_CONFIG = 1,     /* malformed config, unreachable plant, bad poles */
  SPPC_ERROR_NUMERIC = 2,    /* synthesis or solver failure */
  SPPC_ERROR_SIMULATION = 3, /* loop contract violation, e.g. buffer exhausted */
  SPPC_ERROR_ARGUMENT = 4,   /* null handle or pointer, bad enum value */
  SPPC_ERROR_INTERNAL = 5
} sppc_status;

typedef enum sppc_c_interpretation {
  SPPC_C_COLUMN_LIFT = 0,
  SPPC_C_BLOCK_ROW = 1
} sppc_c_interpretation;

typedef enum sppc_solver {
  SPPC_SOLVER_OMP = 0,
  SPPC_SOLVER_L1 = 1
} sppc_solver;

typedef struct sppc_plant sppc_plant;
typedef struct sppc_controller sppc_controller;
typedef struct sppc_experiment sppc_experiment;
typedef struct sppc_trace sppc_trace;
typedef struct sppc_montecarlo sppc_montecarlo;

typedef struct sppc_step_record {
  int k;
  double norm_x;
  double input;
  int dropped;
  int l0;
  double design_time_us;
} sppc_step_record;

SPPC_API const char* sppc_version(void);
SPPC_API const char* sppc_last_error(void);
SPPC_API void sppc_string_free(char* s);

/* ---- plant ------------------------------------------------------------ */

SPPC_API sppc_status sppc_plant_create(size_t n, const double* a, const double* b,
                                       sppc_plant** out);
/* Companion-form plant from n poles given as real and imaginary parts. */
SPPC_API sppc_status sppc_plant_create_from_poles(size_t n, const double* re,
                                                  const double* im, sppc_plant** out);
SPPC_API void sppc_plant_destroy(sppc_plant* plant);
SPPC_API sppc_status sppc_plant_dimension(const sppc_plant* plant, size_t* n);
SPPC_API sppc_status sppc_plant_matrices(const sppc_plant* plant, double* a, double* b);
SPPC_API sppc_status sppc_plant_step(const sppc_plant* plant, const double* x, double u,
                                     double* x_next);
/* Reachability of a raw (A, B) pair; does not require a valid plant. */
SPPC_API sppc_status sppc_is_reachable(size_t n, const double* a, const double* b,
                                       int* reachable);

/* ---- controller: synthesis + packet design ------------------------------ */

/* q may be NULL for the identity. */
SPPC_API sppc_status sppc_controller_create(const sppc_plant* plant, const double* q,
                                            int horizon, double alpha,
                                            sppc_c_interpretation interp,
                                            sppc_controller** out);
SPPC_API void sppc_controller_destroy(sppc_controller* ctrl);
SPPC_API sppc_status sppc_controller_horizon(const sppc_controller* ctrl, int* horizon);
SPPC_API sppc_status sppc_controller_scalars(const sppc_controller* ctrl, double* rho,
                                             double* c, double* riccati_residual,
                                             int* riccati_iterations);
/* Each output is n*n, row-major; any pointer may be NULL. */
SPPC_API sppc_status sppc_controller_matrices(const sppc_controller* ctrl, double* p,
                                              double* eps, double* w);
/* coeffs has room for N values; l0, residual_sq and threshold may be NULL.
 * lambda is ignored by the OMP solver. */
SPPC_API sppc_status sppc_controller_design(const sppc_controller* ctrl, sppc_solver solver,
                                            const double* x, double lambda, double* coeffs,
                                            int* l0, double* residual_sq, double* threshold);

/* ---- experiments (the CLI surface) --------------------------------------- */

SPPC_API sppc_status sppc_experiment_create(const char* config_json, sppc_experiment** out);
SPPC_API sppc_status sppc_experiment_load(const char* path, sppc_experiment** out);
SPPC_API void sppc_experiment_destroy(sppc_experiment* exp);
SPPC_API sppc_status sppc_experiment_set_seed(sppc_experiment* exp, uint64_t seed);
SPPC_API sppc_status sppc_experiment_set_trials(sppc_experiment* exp, int trials);
/* "omp", "l1" or "both". */
SPPC_API sppc_status sppc_experiment_set_solver(sppc_experiment* exp, const char* solver);
/* Whether the configured solver selection includes `solver`. */
SPPC_API sppc_status sppc_experiment_uses_solver(sppc_experiment* exp, sppc_solver solver,
                                                 int* used);
/* Canonical JSON of the resolved configuration. */
SPPC_API sppc_status sppc_experiment_config_json(sppc_experiment* exp, char** out);

/* Runs synthesis and writes the manifest document. checks_ok is set to 1 iff
 * every invariant check passed. */
SPPC_API sppc_status sppc_experiment_synthesize(sppc_experiment* exp, char** manifest_json,
                                                int* checks_ok);

/* Single closed-loop trial with the given solver and the config seed. */
SPPC_API sppc_status sppc_experiment_simulate(sppc_experiment* exp, sppc_solver solver,
                                              sppc_trace** out);
SPPC_API void sppc_trace_destroy(sppc_trace* trace);
SPPC_API sppc_status sppc_trace_length(const sppc_trace* trace, size_t* len);
SPPC_API sppc_status sppc_trace_record(const sppc_trace* trace, size_t k,
                                       sppc_step_record* rec);
SPPC_API sppc_status sppc_trace_csv(const sppc_trace* trace, char** csv);

/* Monte Carlo batch over the configured solver(s); threads >= 1. */
SPPC_API sppc_status sppc_experiment_montecarlo(sppc_experiment* exp, int threads,
                                                sppc_montecarlo** out);
SPPC_API void sppc_montecarlo_destroy(sppc_montecarlo* mc);
SPPC_API sppc_status sppc_montecarlo_aggregate_csv(const sppc_montecarlo* mc, char** csv);
SPPC_API sppc_status sppc_montecarlo_summary_json(const sppc_montecarlo* mc, char** json);
/* Copies the per-k mean of |x(k)| (steps + 1 values) for one solver. */
SPPC_API sppc_status sppc_montecarlo_mean_norm(const sppc_montecarlo* mc, sppc_solver solver,
                                               double* out, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* SPPC_H */
