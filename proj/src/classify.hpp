#pragma once

#include <functional>
#include <string>

#include "env.hpp"
#include "spectral.hpp"

namespace coltree {

// Verdicts carry an Indeterminate state on top of the phase trichotomy:
// it is used when the constant sits inside the critical band but the
// infimum was not attained within the search bound, or when the regularity
// hypotheses behind the Infinite direction fail.
enum class Regime { Finite, Infinite, Critical, Indeterminate };
enum class WalkVerdict { PositiveRecurrent, Transient, Critical, Indeterminate };
enum class RdeVerdict { SolutionExists, NoSolution, Critical, Indeterminate };
enum class FppVerdict { Finite, Infinite, Critical, Indeterminate };

const char* to_string(Regime r);
const char* to_string(WalkVerdict v);
const char* to_string(RdeVerdict v);
const char* to_string(FppVerdict v);

struct RegimeReport {
  double lambda1 = 0.0;
  double lambda1_argmin = 0.0;
  double lambda = 0.0;  // value at the searched infimum (upper bound if unattained)
  double lambda_argmin = 0.0;
  bool lambda_attained = true;
  double eps_critical = 1e-4;
  RegularityReport regularity;
  Regime y_regime = Regime::Indeterminate;
  Regime z_regime = Regime::Indeterminate;
  WalkVerdict rwre = WalkVerdict::Indeterminate;
  RdeVerdict rde = RdeVerdict::Indeterminate;
  FppVerdict fpp = FppVerdict::Indeterminate;
  bool has_speed = false;
  double x0 = 0.0;
  bool x0_degenerate = false;
  std::string warning;  // empty when all hypotheses hold
};

RegimeReport classify(const EnvSpec& env, double eps_critical = 1e-4,
                      double s_max_bound = 64.0);

std::string report_to_json(const RegimeReport& rep);

enum class CriticalTarget { Lambda1, LambdaInf };

// Bisection on constant(param) - 1 over [lo, hi] to |param error| <= 1e-4.
// The endpoints must straddle 1 (either orientation).
double find_critical_parameter(const std::function<EnvSpec(double)>& family,
                               double lo, double hi, CriticalTarget target,
                               double param_tol = 1e-4);

// Named parametrized families for sweeps: "etawalk" (param = h),
// "pointmass-b2" (param = c), "expneg-b2" (param = mu, sigma = 1).
std::function<EnvSpec(double)> sweep_family(const std::string& name);

}  // namespace coltree
