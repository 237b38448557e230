/* coltree: classification and simulation of random environments on
 * coloured b-ary trees, behind a C interface.
 *
 * Conventions:
 *   - Every function returns a status code (COLTREE_OK on success) unless
 *     it returns void or a borrowed pointer.
 *   - On failure, coltree_last_error() describes the problem; the buffer is
 *     thread-local and valid until the next API call on that thread.
 *   - char** outputs receive a heap string owned by the caller; release it
 *     with coltree_string_free(). They are never written on failure.
 *   - Handles are opaque; free them with the matching *_free function.
 *   - Colours, matrix rows and columns are 1-based, matching the config
 *     file schema.
 */
#ifndef COLTREE_H
#define COLTREE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  COLTREE_OK = 0,
  COLTREE_ERR_PARSE = 2,       /* malformed config / builtin string */
  COLTREE_ERR_DOMAIN = 3,      /* mathematically undefined request */
  COLTREE_ERR_BUDGET = 4,      /* work cap exceeded (vertex budget, ...) */
  COLTREE_ERR_INVALID = 5,     /* bad argument (null handle, range, ...) */
  COLTREE_ERR_NO_CROSSING = 6, /* root finding: no sign change in range */
  COLTREE_ERR_CONVERGENCE = 7, /* iteration cap hit before tolerance */
  COLTREE_ERR_INTERNAL = 8
};

typedef struct coltree_env coltree_env;   /* edge-label environment */
typedef struct coltree_walk coltree_walk; /* random-walk jump law spec */
typedef struct coltree_brw coltree_brw;   /* branching-walk step spec */

const char* coltree_version(void);
const char* coltree_last_error(void);
void coltree_string_free(char* s);

/* Digest used in run manifests (FNV-1a 64, lowercase hex). */
int coltree_fnv1a64_hex(const char* text, char** out);

/* ---- environments ---- */

int coltree_env_parse(const char* json_text, coltree_env** out);
/* Named presets, e.g. "etawalk,h=0.5", "pointmass,b=2,c=0.4",
 * "lognormal,b=2,mu=0,sigma=1", "uniform,b=2,lo=0.1,hi=0.9",
 * "expneg,b=2,mu=2,sigma=1". */
int coltree_env_builtin(const char* name_params, coltree_env** out);
void coltree_env_free(coltree_env* env);
int coltree_env_to_json(const coltree_env* env, char** out);
int coltree_env_b(const coltree_env* env, int* out);
int coltree_env_root_color(const coltree_env* env, int* out);

/* ---- spectral quantities ---- */

/* E(label(i,j))^s */
int coltree_moment(const coltree_env* env, int i, int j, double s, double* out);
/* Perron root of the moment matrix at s */
int coltree_rho(const coltree_env* env, double s, double* out);
/* min of rho over s in [0,1] */
int coltree_lambda1(const coltree_env* env, double* value, double* argmin_s);
/* inf of rho over s >= 0, searched up to s_max_bound (pass 0 for default) */
int coltree_lambda_inf(const coltree_env* env, double s_max_bound,
                       double* value, double* argmin_s, int* attained);
/* mean log label under uniform colours: d/ds log rho at 0 minus nothing,
 * i.e. the almost-sure growth rate of log path products */
int coltree_drift(const coltree_env* env, double* out);
/* Legendre-transform rate at z; *finite = 0 means the rate is +infinity */
int coltree_rate_point(const coltree_env* env, double z, double s_max_bound,
                       double* value, double* s0, int* finite);

/* ---- classification ---- */

/* Full regime report as JSON. eps_critical <= 0 and s_max_bound <= 0 pick
 * the defaults (1e-4 and 64). */
int coltree_classify_json(const coltree_env* env, double eps_critical,
                          double s_max_bound, char** out);
/* Parametric families for sweeps: "etawalk" (param h), "pointmass-b2"
 * (param c), "expneg-b2" (param mu). target is "lambda1" or "lambda". */
int coltree_find_critical(const char* family, double lo, double hi,
                          const char* target, double param_tol, double* root);
/* CSV "param,<target>" over an inclusive grid, plus the critical root. */
int coltree_sweep_csv(const char* family, double lo, double hi, int grid,
                      const char* target, char** csv, double* root);

/* CSV "z,rate,s0" on an inclusive grid of n points; +inf rate prints as
 * the sentinel "+inf". */
int coltree_rate_function_csv(const coltree_env* env, double z_lo, double z_hi,
                              int n, char** csv);

/* ---- simulators ---- */

/* Level sums of s-powers of path products against the exact matrix-power
 * oracle. CSV "level,empirical_mean,std_err,oracle,n_trials". */
int coltree_tree_level_csv(const coltree_env* env, int depth, long long trials,
                           uint64_t seed, double s, char** csv);

/* Population-dynamics iteration for the distributional fixed point
 * value = 1 + sum_children label * value(child).
 * CSV "iteration,component,mean,ks_to_previous"; *diverged reports whether
 * the escape sentinel fired and at which iteration. */
int coltree_rde_csv(const coltree_env* env, long long pool, int iterations,
                    uint64_t seed, char** csv, int* diverged,
                    int* diverged_iteration);

int coltree_walk_parse(const char* json_text, coltree_walk** out);
/* Presets: "etawalk,h=0.5", "fixed,p=0.5:0.25:0.25". */
int coltree_walk_builtin(const char* name_params, coltree_walk** out);
void coltree_walk_free(coltree_walk* walk);
int coltree_walk_to_json(const coltree_walk* walk, char** out);
/* Environment of per-edge jump-probability ratios induced by the walk. */
int coltree_walk_env(const coltree_walk* walk, coltree_env** out);
/* Single trajectory summary as JSON: steps, root_visits, max_depth,
 * final_depth, occupation_by_depth, beyond_cut. */
int coltree_walk_simulate_json(const coltree_walk* walk, long long steps,
                               uint64_t seed, int cut_depth, char** out);

int coltree_brw_parse(const char* json_text, coltree_brw** out);
/* Presets: "normal01", "normal,b=2,mu=0,sigma=1", "pointmass,b=2,c=0.3". */
int coltree_brw_builtin(const char* name_params, coltree_brw** out);
void coltree_brw_free(coltree_brw* brw);
int coltree_brw_to_json(const coltree_brw* brw, char** out);
/* Asymptotic speed of the minimal displacement; *degenerate flags specs
 * whose moment curve is flat in s (point-mass rows). s_max_bound <= 0
 * picks the default. */
int coltree_brw_speed(const coltree_brw* brw, double s_max_bound, double* x0,
                      int* degenerate);
/* Repeated minimal-displacement runs. CSV begins with a "# x0=..." comment
 * line, then "trial,mu_final,mu_over_t,sound". window/max_frontier <= 0
 * pick the defaults (30, 1000000). */
int coltree_brw_speed_csv(const coltree_brw* brw, int t_max, long long trials,
                          uint64_t seed, double window, long long max_frontier,
                          char** csv);
/* One run's per-generation trace:
 * CSV "generation,mu_t,frontier_size,pruned,truncated". */
int coltree_brw_trace_csv(const coltree_brw* brw, int t_max, uint64_t seed,
                          double window, long long max_frontier, char** csv);
/* Signed first-passage reach counts #{v at level n : passage time <= t}.
 * CSV "trial,level,count". */
int coltree_fpp_csv(const coltree_brw* brw, double t, int depth,
                    long long trials, uint64_t seed, char** csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COLTREE_H */
