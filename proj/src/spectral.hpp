#pragma once

#include <functional>
#include <vector>

#include "env.hpp"
#include "linalg.hpp"

namespace coltree {

// Spectral side of the classification: everything is driven by the Perron
// root rho(s) of the moment matrix and the convex function
// Lambda(s) = log rho(s) - log b.

struct PerronResult {
  double rho;
  std::vector<double> v;  // right eigenvector, entries > 0, sum 1
  int iterations;
};

// Power iteration on a strictly positive matrix. Stops when the Rayleigh
// quotient moves by < 1e-12 relative and the residual |Mv - rho v|_inf is
// <= 1e-10 rho; ConvergenceError after 1e5 iterations.
PerronResult perron(const Matrix& m);

// s -> m(s); generic so BRW step matrices reuse the same engine.
using MomentFn = std::function<Matrix(double)>;

double rho_of(const MomentFn& fn, double s);
double rho_of(const EnvSpec& env, double s);

struct Lambda1Result {
  double value;
  double argmin_s;  // in [0,1]
};

// min of rho over [0,1] by golden section, |s error| <= 1e-8; flat stretches
// resolve to the smallest s.
Lambda1Result lambda1(const MomentFn& fn);
Lambda1Result lambda1(const EnvSpec& env);

struct LambdaInfResult {
  double value;
  double argmin_s;
  // False when log rho is still strictly decreasing at s_max_bound; the
  // reported value rho(s_max_bound) is then only an upper bound for the inf.
  bool attained_within_bound;
};

LambdaInfResult lambda_inf(const MomentFn& fn, double s_max_bound = 64.0);
LambdaInfResult lambda_inf(const EnvSpec& env, double s_max_bound = 64.0);

// Lambda'(0) by central difference (step 1e-5): the almost-sure growth rate
// of a single path's log weight; equals (1/b^2) sum_ij E log xi_ij.
double drift(const MomentFn& fn, int b);
double drift(const EnvSpec& env);

struct RatePoint {
  double value;   // Legendre transform sup_{s>=0} [s z - Lambda(s)]
  double s0;      // maximizer (0 when z is at or below the drift)
  bool finite;    // false: supremum still increasing at s_max_bound
};

RatePoint rate_function(const MomentFn& fn, int b, double z,
                        double s_max_bound = 64.0);
RatePoint rate_function(const EnvSpec& env, double z,
                        double s_max_bound = 64.0);

struct SpeedResult {
  double x0;
  bool degenerate;  // log rho numerically linear: jump location reported
};

// Root of inf_{s in [0,s_max]} [s x + log rho(s)] = 0 by bisection on
// [-1e3, 1e3], |x error| <= 1e-6. Degeneracy = second differences of
// log rho below 1e-9 at five sample points.
SpeedResult speed_x0(const MomentFn& fn, double s_max_bound = 64.0);
SpeedResult speed_x0(const EnvSpec& env, double s_max_bound = 64.0);

// Golden-section minimum of f on [a,b]; ties drift left.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol);

}  // namespace coltree
