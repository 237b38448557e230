#include "classify.hpp"

#include <cmath>

#include "errors.hpp"
#include "json.hpp"

namespace coltree {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Finite: return "Finite";
    case Regime::Infinite: return "Infinite";
    case Regime::Critical: return "Critical";
    default: return "Indeterminate";
  }
}
const char* to_string(WalkVerdict v) {
  switch (v) {
    case WalkVerdict::PositiveRecurrent: return "PositiveRecurrent";
    case WalkVerdict::Transient: return "Transient";
    case WalkVerdict::Critical: return "Critical";
    default: return "Indeterminate";
  }
}
const char* to_string(RdeVerdict v) {
  switch (v) {
    case RdeVerdict::SolutionExists: return "SolutionExists";
    case RdeVerdict::NoSolution: return "NoSolution";
    case RdeVerdict::Critical: return "Critical";
    default: return "Indeterminate";
  }
}
const char* to_string(FppVerdict v) {
  switch (v) {
    case FppVerdict::Finite: return "Finite";
    case FppVerdict::Infinite: return "Infinite";
    case FppVerdict::Critical: return "Critical";
    default: return "Indeterminate";
  }
}

namespace {

WalkVerdict walk_of(Regime r) {
  switch (r) {
    case Regime::Finite: return WalkVerdict::PositiveRecurrent;
    case Regime::Infinite: return WalkVerdict::Transient;
    case Regime::Critical: return WalkVerdict::Critical;
    default: return WalkVerdict::Indeterminate;
  }
}
RdeVerdict rde_of(Regime r) {
  switch (r) {
    case Regime::Finite: return RdeVerdict::SolutionExists;
    case Regime::Infinite: return RdeVerdict::NoSolution;
    case Regime::Critical: return RdeVerdict::Critical;
    default: return RdeVerdict::Indeterminate;
  }
}
FppVerdict fpp_of(Regime r) {
  switch (r) {
    case Regime::Finite: return FppVerdict::Finite;
    case Regime::Infinite: return FppVerdict::Infinite;
    case Regime::Critical: return FppVerdict::Critical;
    default: return FppVerdict::Indeterminate;
  }
}

}  // namespace

RegimeReport classify(const EnvSpec& env, double eps_critical,
                      double s_max_bound) {
  RegimeReport rep;
  rep.eps_critical = eps_critical;
  rep.regularity = check_regularity(env);

  Lambda1Result l1 = lambda1(env);
  rep.lambda1 = l1.value;
  rep.lambda1_argmin = l1.argmin_s;

  LambdaInfResult li = lambda_inf(env, s_max_bound);
  rep.lambda = li.value;
  rep.lambda_argmin = li.argmin_s;
  rep.lambda_attained = li.attained_within_bound;

  bool regular = rep.regularity.ok();
  if (rep.lambda1 < 1.0 - eps_critical) {
    rep.y_regime = Regime::Finite;
  } else if (rep.lambda1 > 1.0 + eps_critical) {
    // The infinite direction needs the full moment hypotheses.
    rep.y_regime = regular ? Regime::Infinite : Regime::Indeterminate;
    if (!regular) rep.warning = "hypotheses unmet: regularity check failed";
  } else {
    rep.y_regime = Regime::Critical;
  }

  // lambda is only an upper bound on the true infimum when unattained, so
  // a value below the band still proves Finite, but nothing else does.
  if (rep.lambda < 1.0 - eps_critical) {
    rep.z_regime = Regime::Finite;
  } else if (!rep.lambda_attained) {
    rep.z_regime = Regime::Indeterminate;
    if (rep.warning.empty())
      rep.warning = "infimum over s not attained within the search bound";
  } else if (rep.lambda > 1.0 + eps_critical) {
    rep.z_regime = regular ? Regime::Infinite : Regime::Indeterminate;
    if (!regular && rep.warning.empty())
      rep.warning = "hypotheses unmet: regularity check failed";
  } else {
    rep.z_regime = Regime::Critical;
  }

  rep.rwre = walk_of(rep.y_regime);
  rep.rde = rde_of(rep.y_regime);
  rep.fpp = fpp_of(rep.z_regime);

  try {
    SpeedResult sp = speed_x0(env, s_max_bound);
    rep.has_speed = true;
    rep.x0 = sp.x0;
    rep.x0_degenerate = sp.degenerate;
  } catch (const std::runtime_error&) {
    rep.has_speed = false;
  }
  return rep;
}

std::string report_to_json(const RegimeReport& rep) {
  nlohmann::json j;
  j["lambda1"] = rep.lambda1;
  j["lambda1_argmin"] = rep.lambda1_argmin;
  j["lambda"] = rep.lambda;
  j["lambda_argmin"] = rep.lambda_argmin;
  j["lambda_attained_within_bound"] = rep.lambda_attained;
  j["eps_critical"] = rep.eps_critical;
  j["regularity"] = {
      {"unit_interval_in_domain", rep.regularity.unit_interval_in_domain},
      {"zero_interior", rep.regularity.zero_interior},
      {"abs_log_finite", rep.regularity.abs_log_finite},
      {"xi_log_finite", rep.regularity.xi_log_finite},
      {"ok", rep.regularity.ok()},
  };
  j["y_regime"] = to_string(rep.y_regime);
  j["z_regime"] = to_string(rep.z_regime);
  j["rwre"] = to_string(rep.rwre);
  j["rde"] = to_string(rep.rde);
  j["fpp"] = to_string(rep.fpp);
  if (rep.has_speed)
    j["brw_speed"] = {{"x0", rep.x0}, {"degenerate", rep.x0_degenerate}};
  else
    j["brw_speed"] = nullptr;
  if (!rep.warning.empty()) j["warning"] = rep.warning;
  return j.dump(2);
}

namespace {

double target_constant(const EnvSpec& env, CriticalTarget target) {
  if (target == CriticalTarget::Lambda1) return lambda1(env).value;
  LambdaInfResult r = lambda_inf(env);
  if (!r.attained_within_bound)
    throw DomainError(
        "find_critical_parameter: lambda infimum not attained within bound");
  return r.value;
}

}  // namespace

double find_critical_parameter(const std::function<EnvSpec(double)>& family,
                               double lo, double hi, CriticalTarget target,
                               double param_tol) {
  if (lo > hi) std::swap(lo, hi);
  if (!(hi > lo)) throw InvalidArgument("find_critical_parameter: empty range");
  double flo = target_constant(family(lo), target) - 1.0;
  double fhi = target_constant(family(hi), target) - 1.0;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NoCrossingError(
        "find_critical_parameter: constant - 1 has the same sign at both "
        "endpoints");
  while (hi - lo > param_tol) {
    double mid = 0.5 * (lo + hi);
    double fm = target_constant(family(mid), target) - 1.0;
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::function<EnvSpec(double)> sweep_family(const std::string& name) {
  if (name == "etawalk")
    return [](double h) {
      RwreSpec spec;
      spec.b = 2;
      spec.root_color = 1;
      spec.laws.push_back(FixedJump{{0.5, 0.25, 0.25}});
      spec.laws.push_back(EtaJump{0.75, h});
      return induced_env(spec);
    };
  if (name == "pointmass-b2")
    return [](double c) {
      EnvSpec env;
      env.b = 2;
      env.root_color = 1;
      env.sibling_mode = SiblingMode::Independent;
      env.entries.assign(4, DistSpec{PointMass{c}});
      return env;
    };
  if (name == "expneg-b2")
    return [](double mu) {
      EnvSpec env;
      env.b = 2;
      env.root_color = 1;
      env.sibling_mode = SiblingMode::Independent;
      env.entries.assign(4, DistSpec{ExpNegGaussian{mu, 1.0}});
      return env;
    };
  throw ParseError("unknown sweep family \"" + name +
                   "\" (valid: etawalk, pointmass-b2, expneg-b2)");
}

}  // namespace coltree
