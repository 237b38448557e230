#include "brw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"
#include "rng.hpp"
#include "treesim.hpp"

namespace coltree {

namespace {

using nlohmann::json;

double need_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw ParseError(where + ": missing field \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number())
    throw ParseError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

StepSpec parse_step(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError(where + ": step must be an object with string \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  StepSpec d;
  if (kind == "normal") {
    d = NormalStep{need_num(j, "mu", where), need_num(j, "sigma", where)};
  } else if (kind == "point_mass") {
    d = PointStep{need_num(j, "value", where)};
  } else if (kind == "shifted_exponential") {
    d = ShiftedExpStep{need_num(j, "shift", where), need_num(j, "rate", where)};
  } else if (kind == "discrete") {
    if (!j.contains("atoms") || !j.at("atoms").is_array())
      throw ParseError(where + ": discrete needs an \"atoms\" array");
    DiscreteStep dd;
    for (const json& a : j.at("atoms")) {
      if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
        dd.atoms.push_back(Atom{a[0].get<double>(), a[1].get<double>()});
      else if (a.is_object())
        dd.atoms.push_back(Atom{need_num(a, "x", where), need_num(a, "p", where)});
      else
        throw ParseError(where + ": atom must be [x,p] or {x,p}");
    }
    d = dd;
  } else {
    throw ParseError(where + ": unknown kind \"" + kind +
                     "\" (valid: normal, point_mass, shifted_exponential, "
                     "discrete)");
  }
  try {
    validate(d);
  } catch (const InvalidArgument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return d;
}

json step_to_json(const StepSpec& d) {
  json j;
  j["kind"] = kind_name(d);
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) {
          j["mu"] = v.mu;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, PointStep>) {
          j["value"] = v.value;
        } else if constexpr (std::is_same_v<T, ShiftedExpStep>) {
          j["shift"] = v.shift;
          j["rate"] = v.rate;
        } else {
          json atoms = json::array();
          for (const Atom& a : v.atoms) atoms.push_back({a.x, a.p});
          j["atoms"] = atoms;
        }
      },
      d);
  return j;
}

std::pair<std::string, std::vector<std::pair<std::string, std::string>>>
split_builtin(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(text);
  std::string part, name;
  bool first = true;
  while (std::getline(ss, part, ',')) {
    if (first) {
      name = part;
      first = false;
      continue;
    }
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw ParseError("builtin spec: expected k=v, got \"" + part + "\"");
    kv.emplace_back(part.substr(0, eq), part.substr(eq + 1));
  }
  if (name.empty()) throw ParseError("builtin spec: empty name");
  return {name, kv};
}

double kv_num(const std::vector<std::pair<std::string, std::string>>& kv,
              const std::string& key, double dflt, bool required,
              const std::string& name) {
  for (const auto& [k, v] : kv)
    if (k == key) {
      try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
      } catch (...) {
        throw ParseError("builtin " + name + ": bad numeric value for " + key);
      }
    }
  if (required) throw ParseError("builtin " + name + ": missing parameter " + key);
  return dflt;
}

BrwSpec same_step_spec(int b, const StepSpec& d) {
  BrwSpec spec;
  spec.b = b;
  spec.start_type = 1;
  spec.steps.assign(static_cast<std::size_t>(b) * static_cast<std::size_t>(b), d);
  return spec;
}

void validate_brw(const BrwSpec& spec) {
  if (spec.b < 2 || spec.b > 16) throw ParseError("brw: b must be in [2,16]");
  if (spec.start_type < 1 || spec.start_type > spec.b)
    throw ParseError("brw: start_type out of range [1,b]");
  if (static_cast<int>(spec.steps.size()) != spec.b * spec.b)
    throw ParseError("brw: steps must be a b x b array");
}

}  // namespace

BrwSpec parse_brw(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("brw config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("brw config: top level must be an object");
  if (!root.contains("b") || !root.at("b").is_number_integer())
    throw ParseError("brw config: missing integer field \"b\"");
  BrwSpec spec;
  spec.b = root.at("b").get<int>();
  spec.start_type = 1;
  if (root.contains("start_type"))
    spec.start_type = root.at("start_type").get<int>();
  if (!root.contains("steps") || !root.at("steps").is_array())
    throw ParseError("brw config: missing array field \"steps\"");
  const json& rows = root.at("steps");
  if (static_cast<int>(rows.size()) != spec.b)
    throw ParseError("brw config: steps must have exactly b rows");
  for (int i = 1; i <= spec.b; ++i) {
    const json& row = rows[static_cast<std::size_t>(i - 1)];
    if (!row.is_array() || static_cast<int>(row.size()) != spec.b)
      throw ParseError("brw config: steps row " + std::to_string(i) +
                       " must have b entries");
    for (int j = 1; j <= spec.b; ++j)
      spec.steps.push_back(parse_step(
          row[static_cast<std::size_t>(j - 1)],
          "steps(" + std::to_string(i) + "," + std::to_string(j) + ")"));
  }
  validate_brw(spec);
  return spec;
}

std::string brw_to_json(const BrwSpec& spec) {
  json j;
  j["b"] = spec.b;
  j["start_type"] = spec.start_type;
  json rows = json::array();
  for (int i = 1; i <= spec.b; ++i) {
    json row = json::array();
    for (int jx = 1; jx <= spec.b; ++jx) row.push_back(step_to_json(spec.step(i, jx)));
    rows.push_back(row);
  }
  j["steps"] = rows;
  return j.dump(2);
}

BrwSpec builtin_brw(const std::string& name_params) {
  auto [name, kv] = split_builtin(name_params);
  if (name == "normal01") return same_step_spec(2, NormalStep{0.0, 1.0});
  if (name == "normal") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    StepSpec d = NormalStep{kv_num(kv, "mu", 0.0, false, name),
                            kv_num(kv, "sigma", 1.0, false, name)};
    validate(d);
    BrwSpec spec = same_step_spec(b, d);
    validate_brw(spec);
    return spec;
  }
  if (name == "pointmass") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    StepSpec d = PointStep{kv_num(kv, "c", 0.0, true, name)};
    BrwSpec spec = same_step_spec(b, d);
    validate_brw(spec);
    return spec;
  }
  throw ParseError("unknown builtin brw spec \"" + name +
                   "\" (valid: normal01, normal, pointmass)");
}

Matrix brw_moment_matrix(const BrwSpec& spec, double s) {
  Matrix m(spec.b);
  for (int i = 1; i <= spec.b; ++i)
    for (int j = 1; j <= spec.b; ++j) {
      double v = step_moment(spec.step(i, j), s);
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("brw_moment_matrix: entry (" + std::to_string(i) +
                          "," + std::to_string(j) + ") non-finite at s = " +
                          std::to_string(s));
      m(i - 1, j - 1) = v;
    }
  return m;
}

MomentFn brw_moment_fn(const BrwSpec& spec) {
  BrwSpec copy = spec;
  return [copy](double s) { return brw_moment_matrix(copy, s); };
}

std::optional<EnvSpec> brw_env(const BrwSpec& spec) {
  EnvSpec env;
  env.b = spec.b;
  env.root_color = spec.start_type;
  env.sibling_mode = SiblingMode::Independent;
  for (const StepSpec& d : spec.steps) {
    std::optional<DistSpec> label = step_label_law(d);
    if (!label) return std::nullopt;
    env.entries.push_back(*label);
  }
  return env;
}

SpeedResult brw_speed(const BrwSpec& spec, double s_max_bound) {
  return speed_x0(brw_moment_fn(spec), s_max_bound);
}

BrwRun simulate_brw(const BrwSpec& spec, int t_max, std::uint64_t seed,
                    double window, long long max_frontier) {
  if (t_max < 1) throw InvalidArgument("simulate_brw: t_max must be >= 1");
  if (max_frontier < 1)
    throw InvalidArgument("simulate_brw: max_frontier must be >= 1");
  if (!(window > 0.0)) throw InvalidArgument("simulate_brw: window must be > 0");
  int b = spec.b;

  // All-normal specs dominate the budget; skip the variant dispatch there.
  bool all_normal = true;
  std::vector<double> mus, sigmas;
  for (const StepSpec& d : spec.steps) {
    if (const NormalStep* ns = std::get_if<NormalStep>(&d)) {
      mus.push_back(ns->mu);
      sigmas.push_back(ns->sigma);
    } else {
      all_normal = false;
      break;
    }
  }

  Rng rng(seed);
  std::vector<double> pos{0.0};
  std::vector<int> type{spec.start_type};
  std::vector<double> cpos;
  std::vector<int> ctype;
  std::vector<double> scratch;
  BrwRun run;
  for (int g = 1; g <= t_max; ++g) {
    cpos.clear();
    ctype.clear();
    cpos.reserve(pos.size() * static_cast<std::size_t>(b));
    ctype.reserve(pos.size() * static_cast<std::size_t>(b));
    for (std::size_t i = 0; i < pos.size(); ++i) {
      double x = pos[i];
      int ti = type[i];
      if (all_normal) {
        std::size_t base = static_cast<std::size_t>(ti - 1) *
                           static_cast<std::size_t>(b);
        for (int j = 0; j < b; ++j) {
          cpos.push_back(x + mus[base + static_cast<std::size_t>(j)] +
                         sigmas[base + static_cast<std::size_t>(j)] * rng.normal());
          ctype.push_back(j + 1);
        }
      } else {
        for (int j = 1; j <= b; ++j) {
          cpos.push_back(x + sample_step(spec.step(ti, j), rng));
          ctype.push_back(j);
        }
      }
    }
    double mu = cpos[0];
    for (double x : cpos) mu = std::min(mu, x);

    bool pruned = false;
    double cut = mu + window;
    std::size_t w = 0;
    for (std::size_t k = 0; k < cpos.size(); ++k) {
      if (cpos[k] <= cut) {
        cpos[w] = cpos[k];
        ctype[w] = ctype[k];
        ++w;
      } else {
        pruned = true;
      }
    }
    cpos.resize(w);
    ctype.resize(w);

    bool truncated = false;
    if (static_cast<long long>(cpos.size()) > max_frontier) {
      truncated = true;
      run.sound = false;
      scratch = cpos;
      std::size_t keep = static_cast<std::size_t>(max_frontier);
      std::nth_element(scratch.begin(),
                       scratch.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                       scratch.end());
      double thr = scratch[keep - 1];
      std::size_t strictly_below = 0;
      for (double x : cpos)
        if (x < thr) ++strictly_below;
      std::size_t tie_budget = keep - strictly_below;
      std::size_t w2 = 0;
      for (std::size_t k = 0; k < cpos.size() && w2 < keep; ++k) {
        bool take = cpos[k] < thr || (cpos[k] == thr && tie_budget > 0);
        if (!take) continue;
        if (cpos[k] == thr) --tie_budget;
        cpos[w2] = cpos[k];
        ctype[w2] = ctype[k];
        ++w2;
      }
      cpos.resize(w2);
      ctype.resize(w2);
    }

    run.trace.push_back(
        {g, mu, static_cast<long long>(cpos.size()), pruned, truncated});
    run.mu_final = mu;
    pos.swap(cpos);
    type.swap(ctype);
  }
  return run;
}

SpeedEstimate speed_estimate(const BrwSpec& spec, int t_max, long long trials,
                             std::uint64_t seed, double window,
                             long long max_frontier) {
  if (trials < 2) throw InvalidArgument("speed_estimate: need >= 2 trials");
  SpeedResult sp = brw_speed(spec);
  SpeedEstimate out;
  out.x0 = sp.x0;
  out.degenerate = sp.degenerate;
  double sum = 0.0, sumsq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    BrwRun run = simulate_brw(spec, t_max, mix64(seed, static_cast<std::uint64_t>(t)),
                              window, max_frontier);
    double v = run.mu_final / static_cast<double>(t_max);
    out.mu_over_t.push_back(v);
    out.sound.push_back(run.sound);
    out.all_sound = out.all_sound && run.sound;
    sum += v;
    sumsq += v * v;
  }
  double n = static_cast<double>(trials);
  out.mean_mu_over_t = sum / n;
  double var = (sumsq - sum * sum / n) / (n - 1.0);
  out.std_err = std::sqrt(std::max(0.0, var) / n);
  return out;
}

double positivity_frequency(const BrwSpec& spec, int t_max, long long trials,
                            std::uint64_t seed, int trailing, double window,
                            long long max_frontier) {
  if (trials < 1) throw InvalidArgument("positivity_frequency: need >= 1 trial");
  int first = std::max(1, t_max - trailing);
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    BrwRun run = simulate_brw(spec, t_max, mix64(seed, static_cast<std::uint64_t>(t)),
                              window, max_frontier);
    bool ok = true;
    for (const BrwGenRow& row : run.trace)
      if (row.generation >= first && row.mu < 0.0) ok = false;
    if (ok) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

std::vector<std::vector<long long>> fpp_reach(const BrwSpec& spec, double t,
                                              int depth, long long trials,
                                              std::uint64_t seed) {
  if (depth < 0) throw InvalidArgument("fpp_reach: negative depth");
  if (tree_vertex_count(spec.b, depth) > 10000000)
    throw BudgetError("fpp_reach: vertex budget exceeded");
  int b = spec.b;
  std::vector<std::vector<long long>> out;
  out.reserve(static_cast<std::size_t>(trials));
  std::vector<double> time, ctime;
  std::vector<int> type, ctype;
  int perm[17];
  double tau[16];
  for (long long trial = 0; trial < trials; ++trial) {
    Rng rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<long long> counts(static_cast<std::size_t>(depth) + 1, 0);
    time.assign(1, 0.0);
    type.assign(1, spec.start_type);
    counts[0] = (0.0 <= t) ? 1 : 0;
    for (int n = 0; n < depth; ++n) {
      ctime.clear();
      ctype.clear();
      ctime.reserve(time.size() * static_cast<std::size_t>(b));
      ctype.reserve(time.size() * static_cast<std::size_t>(b));
      long long c = 0;
      for (std::size_t q = 0; q < time.size(); ++q) {
        for (int k = 0; k < b; ++k) perm[k] = k + 1;
        for (int k = b - 1; k >= 1; --k) {
          int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
          std::swap(perm[k], perm[j]);
        }
        for (int j = 1; j <= b; ++j)
          tau[j - 1] = sample_step(spec.step(type[q], j), rng);
        for (int k = 0; k < b; ++k) {
          double tt = time[q] + tau[perm[k] - 1];
          if (tt <= t) ++c;
          ctime.push_back(tt);
          ctype.push_back(perm[k]);
        }
      }
      counts[static_cast<std::size_t>(n) + 1] = c;
      time.swap(ctime);
      type.swap(ctype);
    }
    out.push_back(std::move(counts));
  }
  return out;
}

}  // namespace coltree
