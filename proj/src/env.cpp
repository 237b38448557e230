#include "env.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace coltree {

namespace {

using nlohmann::json;

std::string cell(int i, int j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

double need_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw ParseError(where + ": missing field \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number())
    throw ParseError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

DistSpec parse_dist(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": entry must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ParseError(where + ": missing string field \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  DistSpec d;
  if (kind == "point_mass") {
    d = PointMass{need_num(j, "value", where)};
  } else if (kind == "uniform") {
    d = UniformDist{need_num(j, "lo", where), need_num(j, "hi", where)};
  } else if (kind == "log_normal") {
    d = LogNormalDist{need_num(j, "mu", where), need_num(j, "sigma", where)};
  } else if (kind == "exp_neg_gaussian") {
    d = ExpNegGaussian{need_num(j, "mu", where), need_num(j, "sigma", where)};
  } else if (kind == "ratio_uniform") {
    d = RatioUniform{need_num(j, "h", where)};
  } else if (kind == "recip_uniform") {
    d = RecipUniform{need_num(j, "c", where), need_num(j, "h", where)};
  } else if (kind == "discrete") {
    if (!j.contains("atoms") || !j.at("atoms").is_array())
      throw ParseError(where + ": discrete needs an \"atoms\" array");
    DiscreteDist dd;
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
                     "\" (valid: point_mass, uniform, log_normal, discrete, "
                     "exp_neg_gaussian, ratio_uniform, recip_uniform)");
  }
  try {
    validate(d);
  } catch (const InvalidArgument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return d;
}

json dist_to_json(const DistSpec& d) {
  json j;
  j["kind"] = kind_name(d);
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          j["value"] = v.value;
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          j["lo"] = v.lo;
          j["hi"] = v.hi;
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          j["mu"] = v.mu;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          json atoms = json::array();
          for (const Atom& a : v.atoms) atoms.push_back({a.x, a.p});
          j["atoms"] = atoms;
        } else if constexpr (std::is_same_v<T, ExpNegGaussian>) {
          j["mu"] = v.mu;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          j["h"] = v.h;
        } else {
          j["c"] = v.c;
          j["h"] = v.h;
        }
      },
      d);
  return j;
}

void validate_rwre(const RwreSpec& spec) {
  if (spec.b < 2 || spec.b > 16)
    throw ParseError("rwre: b must be in [2,16]");
  if (spec.root_color < 1 || spec.root_color > spec.b)
    throw ParseError("rwre: root_color out of range");
  if (static_cast<int>(spec.laws.size()) != spec.b)
    throw ParseError("rwre: need one jump law per colour");
  for (int i = 0; i < spec.b; ++i) {
    const JumpLaw& law = spec.laws[static_cast<std::size_t>(i)];
    if (const FixedJump* f = std::get_if<FixedJump>(&law)) {
      if (static_cast<int>(f->p.size()) != spec.b + 1)
        throw ParseError("rwre: fixed jump vector for colour " +
                         std::to_string(i + 1) + " must have b+1 entries");
      double tot = 0.0;
      for (double p : f->p) {
        if (!(p > 0.0))
          throw ParseError("rwre: jump probabilities must be positive");
        tot += p;
      }
      if (std::abs(tot - 1.0) > 1e-12)
        throw ParseError("rwre: jump probabilities must sum to 1 within 1e-12");
    } else {
      const EtaJump& e = std::get<EtaJump>(law);
      if (spec.b != 2)
        throw ParseError("rwre: eta jump law is defined for b = 2 only");
      if (!(e.a > 0.0) || !(e.a < 1.0) || !(e.h > 0.0) || !(e.h < 1.0))
        throw ParseError("rwre: eta jump law needs a, h in (0,1)");
    }
  }
}

JumpLaw parse_jump_law(const json& j, int color) {
  std::string where = "jump_laws[" + std::to_string(color) + "]";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError(where + ": need an object with string field \"kind\"");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed") {
    if (!j.contains("p") || !j.at("p").is_array())
      throw ParseError(where + ": fixed law needs array \"p\"");
    FixedJump f;
    for (const json& v : j.at("p")) {
      if (!v.is_number()) throw ParseError(where + ": p entries must be numbers");
      f.p.push_back(v.get<double>());
    }
    return f;
  }
  if (kind == "eta") {
    return EtaJump{need_num(j, "a", where), need_num(j, "h", where)};
  }
  throw ParseError(where + ": unknown kind \"" + kind +
                   "\" (valid: fixed, eta)");
}

json jump_law_to_json(const JumpLaw& law) {
  json j;
  if (const FixedJump* f = std::get_if<FixedJump>(&law)) {
    j["kind"] = "fixed";
    j["p"] = f->p;
  } else {
    const EtaJump& e = std::get<EtaJump>(law);
    j["kind"] = "eta";
    j["a"] = e.a;
    j["h"] = e.h;
  }
  return j;
}

RwreSpec rwre_from_json(const json& spec_json) {
  RwreSpec spec;
  if (!spec_json.is_object()) throw ParseError("rwre: config must be an object");
  if (!spec_json.contains("b") || !spec_json.at("b").is_number_integer())
    throw ParseError("rwre: missing integer field \"b\"");
  spec.b = spec_json.at("b").get<int>();
  spec.root_color = 1;
  if (spec_json.contains("root_color"))
    spec.root_color = spec_json.at("root_color").get<int>();
  if (!spec_json.contains("jump_laws") || !spec_json.at("jump_laws").is_array())
    throw ParseError("rwre: missing array field \"jump_laws\"");
  int c = 1;
  for (const json& law : spec_json.at("jump_laws"))
    spec.laws.push_back(parse_jump_law(law, c++));
  validate_rwre(spec);
  return spec;
}

// "name,k=v,k=v" -> (name, map)
std::pair<std::string, std::vector<std::pair<std::string, std::string>>>
split_builtin(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(text);
  std::string part;
  std::string name;
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
  if (required)
    throw ParseError("builtin " + name + ": missing parameter " + key);
  return dflt;
}

EnvSpec uniform_entry_env(int b, const DistSpec& d) {
  EnvSpec env;
  env.b = b;
  env.root_color = 1;
  env.sibling_mode = SiblingMode::Independent;
  env.entries.assign(static_cast<std::size_t>(b) * b, d);
  return env;
}

}  // namespace

EnvSpec induced_env(const RwreSpec& spec) {
  validate_rwre(spec);
  EnvSpec env;
  env.b = spec.b;
  env.root_color = spec.root_color;
  env.sibling_mode = SiblingMode::RwreJoint;
  env.rwre = std::make_shared<RwreSpec>(spec);
  env.entries.reserve(static_cast<std::size_t>(spec.b) * spec.b);
  for (int i = 1; i <= spec.b; ++i) {
    const JumpLaw& law = spec.laws[static_cast<std::size_t>(i - 1)];
    if (const FixedJump* f = std::get_if<FixedJump>(&law)) {
      for (int j = 1; j <= spec.b; ++j)
        env.entries.push_back(
            PointMass{f->p[static_cast<std::size_t>(j)] / f->p[0]});
    } else {
      const EtaJump& e = std::get<EtaJump>(law);
      // ratios ((1-eta)/eta, (1-a)/(a eta)) of (a eta, a(1-eta), 1-a)
      env.entries.push_back(RatioUniform{e.h});
      env.entries.push_back(RecipUniform{e.a / (1.0 - e.a), e.h});
    }
  }
  return env;
}

EnvSpec parse_env(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("env config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("env config: top level must be an object");
  if (!root.contains("b") || !root.at("b").is_number_integer())
    throw ParseError("env config: missing integer field \"b\"");
  int b = root.at("b").get<int>();
  if (b < 2 || b > 16) throw ParseError("env config: b must be in [2,16]");

  int root_color = 1;
  if (root.contains("root_color")) {
    if (!root.at("root_color").is_number_integer())
      throw ParseError("env config: root_color must be an integer");
    root_color = root.at("root_color").get<int>();
    if (root_color < 1 || root_color > b)
      throw ParseError("env config: root_color out of range [1,b]");
  }

  std::string mode = "independent";
  if (root.contains("sibling_mode")) {
    if (!root.at("sibling_mode").is_string())
      throw ParseError("env config: sibling_mode must be a string");
    mode = root.at("sibling_mode").get<std::string>();
  }

  if (mode == "rwre_joint") {
    if (!root.contains("rwre"))
      throw ParseError("env config: sibling_mode rwre_joint needs a \"rwre\" object");
    RwreSpec spec = rwre_from_json(root.at("rwre"));
    if (spec.b != b) throw ParseError("env config: rwre b mismatch");
    EnvSpec env = induced_env(spec);
    env.root_color = root_color;
    if (root.contains("entries")) {
      // Entries in joint mode are derived; accept only an exact echo.
      const json& rows = root.at("entries");
      if (!rows.is_array() || static_cast<int>(rows.size()) != b)
        throw ParseError("env config: entries must be a b x b array");
      for (int i = 1; i <= b; ++i) {
        const json& row = rows[static_cast<std::size_t>(i - 1)];
        if (!row.is_array() || static_cast<int>(row.size()) != b)
          throw ParseError("env config: missing entry " + cell(i, 1));
        for (int j = 1; j <= b; ++j) {
          DistSpec d = parse_dist(row[static_cast<std::size_t>(j - 1)],
                                  "entries" + cell(i, j));
          if (!dist_equal(d, env.entry(i, j)))
            throw ParseError("env config: entry " + cell(i, j) +
                             " inconsistent with the joint jump law");
        }
      }
    }
    return env;
  }
  if (mode != "independent")
    throw ParseError("env config: sibling_mode must be independent or rwre_joint");

  if (!root.contains("entries") || !root.at("entries").is_array())
    throw ParseError("env config: missing array field \"entries\"");
  const json& rows = root.at("entries");
  if (static_cast<int>(rows.size()) != b)
    throw ParseError("env config: entries must have exactly b rows");

  EnvSpec env;
  env.b = b;
  env.root_color = root_color;
  env.sibling_mode = SiblingMode::Independent;
  env.entries.reserve(static_cast<std::size_t>(b) * b);
  for (int i = 1; i <= b; ++i) {
    const json& row = rows[static_cast<std::size_t>(i - 1)];
    if (!row.is_array())
      throw ParseError("env config: entries row " + std::to_string(i) +
                       " must be an array");
    if (static_cast<int>(row.size()) != b) {
      int j = static_cast<int>(row.size()) + 1;
      throw ParseError("env config: missing entry " + cell(i, std::min(j, b)));
    }
    for (int j = 1; j <= b; ++j)
      env.entries.push_back(parse_dist(row[static_cast<std::size_t>(j - 1)],
                                       "entries" + cell(i, j)));
  }
  return env;
}

std::string env_to_json(const EnvSpec& env) {
  json j;
  j["b"] = env.b;
  j["root_color"] = env.root_color;
  j["sibling_mode"] =
      env.sibling_mode == SiblingMode::Independent ? "independent" : "rwre_joint";
  json rows = json::array();
  for (int i = 1; i <= env.b; ++i) {
    json row = json::array();
    for (int jx = 1; jx <= env.b; ++jx) row.push_back(dist_to_json(env.entry(i, jx)));
    rows.push_back(row);
  }
  j["entries"] = rows;
  if (env.rwre) {
    json r;
    r["b"] = env.rwre->b;
    r["root_color"] = env.rwre->root_color;
    json laws = json::array();
    for (const JumpLaw& law : env.rwre->laws) laws.push_back(jump_law_to_json(law));
    r["jump_laws"] = laws;
    j["rwre"] = r;
  }
  return j.dump(2);
}

RwreSpec parse_rwre(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("rwre config: invalid JSON: ") + e.what());
  }
  return rwre_from_json(root);
}

std::string rwre_to_json(const RwreSpec& spec) {
  json r;
  r["b"] = spec.b;
  r["root_color"] = spec.root_color;
  json laws = json::array();
  for (const JumpLaw& law : spec.laws) laws.push_back(jump_law_to_json(law));
  r["jump_laws"] = laws;
  return r.dump(2);
}

RwreSpec builtin_rwre(const std::string& name_params) {
  auto [name, kv] = split_builtin(name_params);
  if (name == "etawalk") {
    double h = kv_num(kv, "h", 0.0, true, name);
    RwreSpec spec;
    spec.b = 2;
    spec.root_color = 1;
    spec.laws.push_back(FixedJump{{0.5, 0.25, 0.25}});
    spec.laws.push_back(EtaJump{0.75, h});
    validate_rwre(spec);
    return spec;
  }
  if (name == "fixed") {
    // fixed,p=0.9:0.05:0.05 (same law for every colour), b = entries - 1
    std::string pstr;
    for (const auto& [k, v] : kv)
      if (k == "p") pstr = v;
    if (pstr.empty()) throw ParseError("builtin fixed: missing parameter p");
    FixedJump f;
    std::stringstream ss(pstr);
    std::string tok;
    while (std::getline(ss, tok, ':')) f.p.push_back(std::stod(tok));
    RwreSpec spec;
    spec.b = static_cast<int>(f.p.size()) - 1;
    spec.root_color = 1;
    spec.laws.assign(static_cast<std::size_t>(spec.b), f);
    validate_rwre(spec);
    return spec;
  }
  throw ParseError("unknown builtin walk spec \"" + name +
                   "\" (valid: etawalk, fixed)");
}

EnvSpec builtin_env(const std::string& name_params) {
  auto [name, kv] = split_builtin(name_params);
  if (name == "etawalk") {
    return induced_env(builtin_rwre(name_params));
  }
  if (name == "pointmass") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    double c = kv_num(kv, "c", 0.0, true, name);
    DistSpec d = PointMass{c};
    validate(d);
    return uniform_entry_env(b, d);
  }
  if (name == "lognormal") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    DistSpec d = LogNormalDist{kv_num(kv, "mu", 0.0, false, name),
                               kv_num(kv, "sigma", 1.0, false, name)};
    validate(d);
    return uniform_entry_env(b, d);
  }
  if (name == "uniform") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    DistSpec d = UniformDist{kv_num(kv, "lo", 0.0, true, name),
                             kv_num(kv, "hi", 0.0, true, name)};
    validate(d);
    return uniform_entry_env(b, d);
  }
  if (name == "expneg") {
    int b = static_cast<int>(kv_num(kv, "b", 2, false, name));
    DistSpec d = ExpNegGaussian{kv_num(kv, "mu", 0.0, false, name),
                                kv_num(kv, "sigma", 1.0, false, name)};
    validate(d);
    return uniform_entry_env(b, d);
  }
  throw ParseError("unknown builtin env \"" + name +
                   "\" (valid: etawalk, pointmass, lognormal, uniform, expneg)");
}

Matrix moment_matrix(const EnvSpec& env, double s) {
  Matrix m(env.b);
  for (int i = 1; i <= env.b; ++i)
    for (int j = 1; j <= env.b; ++j) {
      double v = moment(env.entry(i, j), s);
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("moment_matrix: entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") non-finite at s = " +
                          std::to_string(s));
      m(i - 1, j - 1) = v;
    }
  return m;
}

void sample_jump(const RwreSpec& spec, int color, Rng& rng,
                 std::span<double> out) {
  const JumpLaw& law = spec.laws[static_cast<std::size_t>(color - 1)];
  if (const FixedJump* f = std::get_if<FixedJump>(&law)) {
    for (std::size_t k = 0; k < f->p.size(); ++k) out[k] = f->p[k];
  } else {
    const EtaJump& e = std::get<EtaJump>(law);
    double eta = rng.uniform(e.h, 1.0);
    out[0] = e.a * eta;
    out[1] = e.a * (1.0 - eta);
    out[2] = 1.0 - e.a;
  }
}

void sample_row(const EnvSpec& env, int parent_color, Rng& rng,
                std::span<double> out) {
  if (env.sibling_mode == SiblingMode::RwreJoint) {
    double p[17];
    sample_jump(*env.rwre, parent_color, rng,
                std::span<double>(p, static_cast<std::size_t>(env.b) + 1));
    for (int j = 1; j <= env.b; ++j)
      out[static_cast<std::size_t>(j - 1)] = p[j] / p[0];
  } else {
    for (int j = 1; j <= env.b; ++j)
      out[static_cast<std::size_t>(j - 1)] = sample(env.entry(parent_color, j), rng);
  }
}

RegularityReport check_regularity(const EnvSpec& env) {
  RegularityReport rep{true, true, true, true};
  for (const DistSpec& d : env.entries) {
    double lo = domain_lower(d);
    // every catalogue family has D open above with sup = +inf
    if (!(lo < 0.0)) rep.unit_interval_in_domain = false;
    if (!(lo < 0.0)) rep.zero_interior = false;
    TailFacts tf = tail_facts(d);
    rep.abs_log_finite = rep.abs_log_finite && tf.abs_log_finite;
    rep.xi_log_finite = rep.xi_log_finite && tf.xi_log_finite;
  }
  return rep;
}

std::vector<std::pair<std::string, EnvSpec>> catalogue_envs() {
  std::vector<std::pair<std::string, EnvSpec>> out;
  out.emplace_back("pointmass_sub", builtin_env("pointmass,b=2,c=0.4"));
  out.emplace_back("pointmass_super", builtin_env("pointmass,b=2,c=1.5"));
  out.emplace_back("uniform", builtin_env("uniform,b=2,lo=0.5,hi=2.0"));
  out.emplace_back("lognormal", builtin_env("lognormal,b=2,mu=0,sigma=1"));
  out.emplace_back("lognormal_sub", builtin_env("lognormal,b=2,mu=-1,sigma=0.5"));
  out.emplace_back("expneg", builtin_env("expneg,b=2,mu=2,sigma=1"));
  out.emplace_back("etawalk_sub", builtin_env("etawalk,h=0.6"));
  out.emplace_back("etawalk_crit", builtin_env("etawalk,h=0.417"));
  out.emplace_back("etawalk_super", builtin_env("etawalk,h=0.2"));
  {
    EnvSpec env;
    env.b = 2;
    env.root_color = 2;
    env.sibling_mode = SiblingMode::Independent;
    DiscreteDist d1{{Atom{0.5, 0.5}, Atom{2.0, 0.5}}};
    DiscreteDist d2{{Atom{0.25, 0.25}, Atom{1.0, 0.75}}};
    env.entries = {DistSpec{d1}, DistSpec{d2}, DistSpec{d2}, DistSpec{d1}};
    out.emplace_back("discrete_mixed", env);
  }
  {
    // b = 3, every family mixed in one table
    EnvSpec env;
    env.b = 3;
    env.root_color = 1;
    env.sibling_mode = SiblingMode::Independent;
    env.entries = {
        DistSpec{PointMass{0.8}},
        DistSpec{UniformDist{0.2, 1.1}},
        DistSpec{LogNormalDist{-0.5, 0.7}},
        DistSpec{ExpNegGaussian{0.3, 0.4}},
        DistSpec{RatioUniform{0.45}},
        DistSpec{RecipUniform{2.5, 0.35}},
        DistSpec{DiscreteDist{{Atom{0.3, 0.6}, Atom{1.4, 0.4}}}},
        DistSpec{PointMass{1.2}},
        DistSpec{UniformDist{0.6, 0.9}},
    };
    out.emplace_back("b3_mixed", env);
  }
  return out;
}

}  // namespace coltree
