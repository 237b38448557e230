#include "coltree/coltree.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>

#include "brw.hpp"
#include "classify.hpp"
#include "env.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "json.hpp"
#include "rde.hpp"
#include "rwre.hpp"
#include "spectral.hpp"
#include "treesim.hpp"

struct coltree_env {
  coltree::EnvSpec spec;
};
struct coltree_walk {
  coltree::RwreSpec spec;
};
struct coltree_brw {
  coltree::BrwSpec spec;
};

namespace {

thread_local std::string g_error;

template <typename Fn>
int wrap(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return COLTREE_OK;
  } catch (const coltree::ParseError& e) {
    g_error = e.what();
    return COLTREE_ERR_PARSE;
  } catch (const coltree::DomainError& e) {
    g_error = e.what();
    return COLTREE_ERR_DOMAIN;
  } catch (const coltree::BudgetError& e) {
    g_error = e.what();
    return COLTREE_ERR_BUDGET;
  } catch (const coltree::InvalidArgument& e) {
    g_error = e.what();
    return COLTREE_ERR_INVALID;
  } catch (const coltree::NoCrossingError& e) {
    g_error = e.what();
    return COLTREE_ERR_NO_CROSSING;
  } catch (const coltree::ConvergenceError& e) {
    g_error = e.what();
    return COLTREE_ERR_CONVERGENCE;
  } catch (const std::exception& e) {
    g_error = e.what();
    return COLTREE_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown error";
    return COLTREE_ERR_INTERNAL;
  }
}

int fail_invalid(const char* msg) {
  g_error = msg;
  return COLTREE_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

double or_default(double v, double dflt) { return v > 0.0 ? v : dflt; }

const char* csv_bool(bool b) { return b ? "1" : "0"; }

}  // namespace

extern "C" {

const char* coltree_version(void) { return "0.1.0"; }

const char* coltree_last_error(void) { return g_error.c_str(); }

void coltree_string_free(char* s) { std::free(s); }

int coltree_fnv1a64_hex(const char* text, char** out) {
  if (!text || !out) return fail_invalid("null argument");
  return wrap([&] { *out = dup_string(coltree::fnv1a64_hex(text)); });
}

/* ---- environments ---- */

int coltree_env_parse(const char* json_text, coltree_env** out) {
  if (!json_text || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_env{coltree::parse_env(json_text)}; });
}

int coltree_env_builtin(const char* name_params, coltree_env** out) {
  if (!name_params || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_env{coltree::builtin_env(name_params)}; });
}

void coltree_env_free(coltree_env* env) { delete env; }

int coltree_env_to_json(const coltree_env* env, char** out) {
  if (!env || !out) return fail_invalid("null argument");
  return wrap([&] { *out = dup_string(coltree::env_to_json(env->spec)); });
}

int coltree_env_b(const coltree_env* env, int* out) {
  if (!env || !out) return fail_invalid("null argument");
  *out = env->spec.b;
  return COLTREE_OK;
}

int coltree_env_root_color(const coltree_env* env, int* out) {
  if (!env || !out) return fail_invalid("null argument");
  *out = env->spec.root_color;
  return COLTREE_OK;
}

/* ---- spectral quantities ---- */

int coltree_moment(const coltree_env* env, int i, int j, double s, double* out) {
  if (!env || !out) return fail_invalid("null argument");
  return wrap([&] {
    if (i < 1 || i > env->spec.b || j < 1 || j > env->spec.b)
      throw coltree::InvalidArgument("moment: colour index out of range");
    *out = coltree::moment(env->spec.entry(i, j), s);
  });
}

int coltree_rho(const coltree_env* env, double s, double* out) {
  if (!env || !out) return fail_invalid("null argument");
  return wrap([&] { *out = coltree::rho_of(env->spec, s); });
}

int coltree_lambda1(const coltree_env* env, double* value, double* argmin_s) {
  if (!env || !value) return fail_invalid("null argument");
  return wrap([&] {
    coltree::Lambda1Result r = coltree::lambda1(env->spec);
    *value = r.value;
    if (argmin_s) *argmin_s = r.argmin_s;
  });
}

int coltree_lambda_inf(const coltree_env* env, double s_max_bound,
                       double* value, double* argmin_s, int* attained) {
  if (!env || !value) return fail_invalid("null argument");
  return wrap([&] {
    coltree::LambdaInfResult r =
        coltree::lambda_inf(env->spec, or_default(s_max_bound, 64.0));
    *value = r.value;
    if (argmin_s) *argmin_s = r.argmin_s;
    if (attained) *attained = r.attained_within_bound ? 1 : 0;
  });
}

int coltree_drift(const coltree_env* env, double* out) {
  if (!env || !out) return fail_invalid("null argument");
  return wrap([&] { *out = coltree::drift(env->spec); });
}

int coltree_rate_point(const coltree_env* env, double z, double s_max_bound,
                       double* value, double* s0, int* finite) {
  if (!env || !value) return fail_invalid("null argument");
  return wrap([&] {
    coltree::RatePoint r =
        coltree::rate_function(env->spec, z, or_default(s_max_bound, 64.0));
    *value = r.value;
    if (s0) *s0 = r.s0;
    if (finite) *finite = r.finite ? 1 : 0;
  });
}

/* ---- classification ---- */

int coltree_classify_json(const coltree_env* env, double eps_critical,
                          double s_max_bound, char** out) {
  if (!env || !out) return fail_invalid("null argument");
  return wrap([&] {
    coltree::RegimeReport rep =
        coltree::classify(env->spec, or_default(eps_critical, 1e-4),
                          or_default(s_max_bound, 64.0));
    *out = dup_string(coltree::report_to_json(rep));
  });
}

namespace {

coltree::CriticalTarget parse_target(const char* target) {
  std::string t = target;
  if (t == "lambda1") return coltree::CriticalTarget::Lambda1;
  if (t == "lambda") return coltree::CriticalTarget::LambdaInf;
  throw coltree::InvalidArgument("target must be \"lambda1\" or \"lambda\"");
}

}  // namespace

int coltree_find_critical(const char* family, double lo, double hi,
                          const char* target, double param_tol, double* root) {
  if (!family || !target || !root) return fail_invalid("null argument");
  return wrap([&] {
    *root = coltree::find_critical_parameter(
        coltree::sweep_family(family), lo, hi, parse_target(target),
        or_default(param_tol, 1e-4));
  });
}

int coltree_sweep_csv(const char* family, double lo, double hi, int grid,
                      const char* target, char** csv, double* root) {
  if (!family || !target || !csv) return fail_invalid("null argument");
  return wrap([&] {
    if (grid < 2) throw coltree::InvalidArgument("sweep: grid must be >= 2");
    coltree::CriticalTarget tgt = parse_target(target);
    auto fam = coltree::sweep_family(family);
    double a = lo, b = hi;
    if (a > b) std::swap(a, b);
    std::ostringstream os;
    os << "param," << target << "\n";
    for (int i = 0; i < grid; ++i) {
      double p = a + (b - a) * static_cast<double>(i) /
                         static_cast<double>(grid - 1);
      coltree::EnvSpec env = fam(p);
      double v = tgt == coltree::CriticalTarget::Lambda1
                     ? coltree::lambda1(env).value
                     : coltree::lambda_inf(env).value;
      os << coltree::fmt_double(p) << "," << coltree::fmt_double(v) << "\n";
    }
    double r = coltree::find_critical_parameter(fam, a, b, tgt);
    *csv = dup_string(os.str());
    if (root) *root = r;
  });
}

int coltree_rate_function_csv(const coltree_env* env, double z_lo, double z_hi,
                              int n, char** csv) {
  if (!env || !csv) return fail_invalid("null argument");
  return wrap([&] {
    if (n < 1) throw coltree::InvalidArgument("rate grid must have >= 1 point");
    std::ostringstream os;
    os << "z,rate,s0\n";
    for (int i = 0; i < n; ++i) {
      double z = n == 1 ? z_lo
                        : z_lo + (z_hi - z_lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
      coltree::RatePoint r = coltree::rate_function(env->spec, z);
      double value = r.finite ? r.value
                              : std::numeric_limits<double>::infinity();
      os << coltree::fmt_double(z) << "," << coltree::fmt_double(value) << ","
         << coltree::fmt_double(r.s0) << "\n";
    }
    *csv = dup_string(os.str());
  });
}

/* ---- simulators ---- */

int coltree_tree_level_csv(const coltree_env* env, int depth, long long trials,
                           uint64_t seed, double s, char** csv) {
  if (!env || !csv) return fail_invalid("null argument");
  return wrap([&] {
    coltree::LevelStats st =
        coltree::estimate_level_sums(env->spec, s, depth, trials, seed);
    std::ostringstream os;
    os << "level,empirical_mean,std_err,oracle,n_trials\n";
    for (std::size_t n = 0; n < st.empirical_mean.size(); ++n)
      os << n << "," << coltree::fmt_double(st.empirical_mean[n]) << ","
         << coltree::fmt_double(st.std_err[n]) << ","
         << coltree::fmt_double(st.oracle[n]) << "," << st.trials << "\n";
    *csv = dup_string(os.str());
  });
}

int coltree_rde_csv(const coltree_env* env, long long pool, int iterations,
                    uint64_t seed, char** csv, int* diverged,
                    int* diverged_iteration) {
  if (!env || !csv) return fail_invalid("null argument");
  return wrap([&] {
    coltree::RdeTrace tr =
        coltree::rde_iterate(env->spec, pool, iterations, seed);
    std::ostringstream os;
    os << "iteration,component,mean,ks_to_previous\n";
    for (const coltree::RdeIterRow& row : tr.rows)
      os << row.iteration << "," << row.component << ","
         << coltree::fmt_double(row.mean) << ","
         << coltree::fmt_double(row.ks_to_previous) << "\n";
    *csv = dup_string(os.str());
    if (diverged) *diverged = tr.diverged ? 1 : 0;
    if (diverged_iteration) *diverged_iteration = tr.diverged_iteration;
  });
}

int coltree_walk_parse(const char* json_text, coltree_walk** out) {
  if (!json_text || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_walk{coltree::parse_rwre(json_text)}; });
}

int coltree_walk_builtin(const char* name_params, coltree_walk** out) {
  if (!name_params || !out) return fail_invalid("null argument");
  return wrap(
      [&] { *out = new coltree_walk{coltree::builtin_rwre(name_params)}; });
}

void coltree_walk_free(coltree_walk* walk) { delete walk; }

int coltree_walk_to_json(const coltree_walk* walk, char** out) {
  if (!walk || !out) return fail_invalid("null argument");
  return wrap([&] { *out = dup_string(coltree::rwre_to_json(walk->spec)); });
}

int coltree_walk_env(const coltree_walk* walk, coltree_env** out) {
  if (!walk || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_env{coltree::induced_env(walk->spec)}; });
}

int coltree_walk_simulate_json(const coltree_walk* walk, long long steps,
                               uint64_t seed, int cut_depth, char** out) {
  if (!walk || !out) return fail_invalid("null argument");
  return wrap([&] {
    coltree::WalkSummary w = coltree::simulate_walk(
        walk->spec, steps, seed, cut_depth > 0 ? cut_depth : 32);
    nlohmann::json j;
    j["steps"] = w.steps;
    j["root_visits"] = w.root_visits;
    j["max_depth"] = w.max_depth;
    j["final_depth"] = w.final_depth;
    j["occupation_by_depth"] = w.occupation_by_depth;
    j["beyond_cut"] = w.beyond_cut;
    *out = dup_string(j.dump(2));
  });
}

int coltree_brw_parse(const char* json_text, coltree_brw** out) {
  if (!json_text || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_brw{coltree::parse_brw(json_text)}; });
}

int coltree_brw_builtin(const char* name_params, coltree_brw** out) {
  if (!name_params || !out) return fail_invalid("null argument");
  return wrap([&] { *out = new coltree_brw{coltree::builtin_brw(name_params)}; });
}

void coltree_brw_free(coltree_brw* brw) { delete brw; }

int coltree_brw_to_json(const coltree_brw* brw, char** out) {
  if (!brw || !out) return fail_invalid("null argument");
  return wrap([&] { *out = dup_string(coltree::brw_to_json(brw->spec)); });
}

int coltree_brw_speed(const coltree_brw* brw, double s_max_bound, double* x0,
                      int* degenerate) {
  if (!brw || !x0) return fail_invalid("null argument");
  return wrap([&] {
    coltree::SpeedResult r =
        coltree::brw_speed(brw->spec, or_default(s_max_bound, 64.0));
    *x0 = r.x0;
    if (degenerate) *degenerate = r.degenerate ? 1 : 0;
  });
}

int coltree_brw_speed_csv(const coltree_brw* brw, int t_max, long long trials,
                          uint64_t seed, double window, long long max_frontier,
                          char** csv) {
  if (!brw || !csv) return fail_invalid("null argument");
  return wrap([&] {
    coltree::SpeedEstimate est = coltree::speed_estimate(
        brw->spec, t_max, trials, seed, or_default(window, 30.0),
        max_frontier > 0 ? max_frontier : 1000000);
    std::ostringstream os;
    os << "# x0=" << coltree::fmt_double(est.x0) << "\n";
    os << "trial,mu_final,mu_over_t,sound\n";
    for (std::size_t i = 0; i < est.mu_over_t.size(); ++i)
      os << i << ","
         << coltree::fmt_double(est.mu_over_t[i] * static_cast<double>(t_max))
         << "," << coltree::fmt_double(est.mu_over_t[i]) << ","
         << csv_bool(est.sound[i]) << "\n";
    *csv = dup_string(os.str());
  });
}

int coltree_brw_trace_csv(const coltree_brw* brw, int t_max, uint64_t seed,
                          double window, long long max_frontier, char** csv) {
  if (!brw || !csv) return fail_invalid("null argument");
  return wrap([&] {
    coltree::BrwRun run = coltree::simulate_brw(
        brw->spec, t_max, seed, or_default(window, 30.0),
        max_frontier > 0 ? max_frontier : 1000000);
    std::ostringstream os;
    os << "generation,mu_t,frontier_size,pruned,truncated\n";
    for (const coltree::BrwGenRow& row : run.trace)
      os << row.generation << "," << coltree::fmt_double(row.mu) << ","
         << row.frontier << "," << csv_bool(row.pruned) << ","
         << csv_bool(row.truncated) << "\n";
    *csv = dup_string(os.str());
  });
}

int coltree_fpp_csv(const coltree_brw* brw, double t, int depth,
                    long long trials, uint64_t seed, char** csv) {
  if (!brw || !csv) return fail_invalid("null argument");
  return wrap([&] {
    std::vector<std::vector<long long>> counts =
        coltree::fpp_reach(brw->spec, t, depth, trials, seed);
    std::ostringstream os;
    os << "trial,level,count\n";
    for (std::size_t trial = 0; trial < counts.size(); ++trial)
      for (std::size_t level = 0; level < counts[trial].size(); ++level)
        os << trial << "," << level << "," << counts[trial][level] << "\n";
    *csv = dup_string(os.str());
  });
}

} /* extern "C" */
