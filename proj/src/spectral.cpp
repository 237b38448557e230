#include "spectral.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace coltree {

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

MomentFn env_fn(const EnvSpec& env) {
  EnvSpec copy = env;
  return [copy](double s) { return moment_matrix(copy, s); };
}

// log rho(s) made safe for the large-s searches: every catalogued moment is
// mathematically finite at s >= 0, so a non-finite entry can only be double
// overflow and the log-domain value is effectively +inf. Entries that
// underflowed to zero are clamped to the smallest subnormal instead, which
// keeps the Perron root a (tiny) positive number.
double log_rho_or_inf(const MomentFn& fn, double s) {
  try {
    Matrix m = fn(s);
    for (double& x : m.a) {
      if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
      if (x <= 0.0) x = 5e-324;
    }
    return std::log(perron(m).rho);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

PerronResult perron(const Matrix& m) {
  int n = m.n;
  if (n < 1) throw InvalidArgument("perron: empty matrix");
  for (double x : m.a)
    if (!(x > 0.0) || !std::isfinite(x))
      throw DomainError("perron: matrix must be strictly positive and finite");

  std::vector<double> v(static_cast<std::size_t>(n), 1.0 / n);
  double rho = 0.0;
  const int cap = 100000;
  for (int it = 1; it <= cap; ++it) {
    std::vector<double> w = matvec(m, v);
    double sum = 0.0;
    for (double x : w) sum += x;
    double rho_new = sum;  // v sums to 1, so sum(Mv) is the Rayleigh quotient
    for (double& x : w) x /= sum;
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = std::abs(w[static_cast<std::size_t>(i)] * rho_new -
                          v[static_cast<std::size_t>(i)] * rho_new);
      // |Mv - rho v|_inf with v the previous iterate, both normalized:
      // Mv = rho_new * w, so the residual is rho_new * |w - v|_inf.
      resid = std::max(resid, r);
    }
    bool rayleigh_ok = std::abs(rho_new - rho) <= 1e-12 * std::abs(rho_new);
    v = std::move(w);
    rho = rho_new;
    if (rayleigh_ok && resid <= 1e-10 * rho) return {rho, v, it};
  }
  throw ConvergenceError("perron: power iteration cap exceeded");
}

double rho_of(const MomentFn& fn, double s) { return perron(fn(s)).rho; }
double rho_of(const EnvSpec& env, double s) { return perron(moment_matrix(env, s)).rho; }

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {  // ties move left so flat minima resolve to smallest s
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Lambda1Result lambda1(const MomentFn& fn) {
  auto f = [&fn](double s) { return std::log(rho_of(fn, s)); };
  double s = golden_min(f, 0.0, 1.0, 1e-8);
  return {rho_of(fn, s), s};
}
Lambda1Result lambda1(const EnvSpec& env) { return lambda1(env_fn(env)); }

LambdaInfResult lambda_inf(const MomentFn& fn, double s_max_bound) {
  auto f = [&fn](double s) { return log_rho_or_inf(fn, s); };
  // Bracket by doubling from s = 1: 0, 1, 2, 4, ... capped at the bound.
  double s_prev2 = 0.0, s_prev = 0.0;
  double f_prev = f(0.0);
  double s_cur = 1.0;
  while (true) {
    if (s_cur > s_max_bound) s_cur = s_max_bound;
    double f_cur = f(s_cur);
    if (f_cur >= f_prev) {
      double s = golden_min(f, s_prev2, s_cur, 1e-8);
      return {std::exp(f(s)), s, true};
    }
    if (s_cur >= s_max_bound) {
      // still strictly decreasing at the bound
      return {std::exp(f_cur), s_max_bound, false};
    }
    s_prev2 = s_prev;
    s_prev = s_cur;
    f_prev = f_cur;
    s_cur *= 2.0;
  }
}
LambdaInfResult lambda_inf(const EnvSpec& env, double s_max_bound) {
  return lambda_inf(env_fn(env), s_max_bound);
}

double drift(const MomentFn& fn, int b) {
  const double h = 1e-5;
  double lp = std::log(rho_of(fn, h));
  double lm = std::log(rho_of(fn, -h));
  (void)b;  // log b cancels in the difference
  return (lp - lm) / (2.0 * h);
}
double drift(const EnvSpec& env) {
  // every catalogue family has moments on both sides of 0
  return drift(env_fn(env), env.b);
}

RatePoint rate_function(const MomentFn& fn, int b, double z,
                        double s_max_bound) {
  double logb = std::log(static_cast<double>(b));
  auto lam = [&fn, logb](double s) { return log_rho_or_inf(fn, s) - logb; };
  double mu = drift(fn, b);
  if (z <= mu) return {0.0, 0.0, true};
  auto neg_g = [&lam, z](double s) { return lam(s) - s * z; };  // minimize -g
  // g is concave with g'(0) > 0; double until it stops increasing.
  double s_prev2 = 0.0, s_prev = 0.0;
  double g_prev = 0.0;  // g(0) = -Lambda(0) = 0
  double s_cur = 1.0;
  while (true) {
    if (s_cur > s_max_bound) s_cur = s_max_bound;
    double g_cur = -neg_g(s_cur);
    if (g_cur <= g_prev) {
      double s0 = golden_min(neg_g, s_prev2, s_cur, 1e-8);
      return {s0 * z - lam(s0), s0, true};
    }
    if (s_cur >= s_max_bound)
      return {std::numeric_limits<double>::infinity(), s_max_bound, false};
    s_prev2 = s_prev;
    s_prev = s_cur;
    g_prev = g_cur;
    s_cur *= 2.0;
  }
}
RatePoint rate_function(const EnvSpec& env, double z, double s_max_bound) {
  return rate_function(env_fn(env), env.b, z, s_max_bound);
}

SpeedResult speed_x0(const MomentFn& fn, double s_max_bound) {
  auto f = [&fn](double s) { return log_rho_or_inf(fn, s); };

  // Strict log-convexity probe: second differences at five points.
  const double probe[5] = {0.5, 1.0, 2.0, 4.0, 8.0};
  const double d = 0.1;
  bool strictly_convex = true;
  for (double s : probe) {
    if (s + d > s_max_bound) break;
    double dd = f(s - d) - 2.0 * f(s) + f(s + d);
    if (dd <= 1e-9) {
      strictly_convex = false;
      break;
    }
  }
  if (!strictly_convex) {
    // log rho is (numerically) linear: the candidate speed is the jump
    // location -d(log rho)/ds, read off at the far end.
    double slope = (f(s_max_bound) - f(s_max_bound - 1.0)) / 1.0;
    return {-slope, true};
  }

  auto g = [&f, s_max_bound](double x) {
    auto obj = [&f, x](double s) { return s * x + f(s); };
    double s = golden_min(obj, 0.0, s_max_bound, 1e-6);
    return obj(s);
  };

  double lo = -1000.0, hi = 1000.0;
  double glo = g(lo), ghi = g(hi);
  if (!(glo < 0.0) || !(ghi > 0.0))
    throw NoCrossingError("speed_x0: no sign change on [-1e3, 1e3]");
  while (hi - lo > 1e-7) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), false};
}
SpeedResult speed_x0(const EnvSpec& env, double s_max_bound) {
  return speed_x0(env_fn(env), s_max_bound);
}

}  // namespace coltree
