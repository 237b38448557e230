#include "dist.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "quadrature.hpp"

namespace coltree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_atoms(const std::vector<Atom>& atoms, bool positive_support) {
  if (atoms.empty()) throw InvalidArgument("discrete: no atoms");
  double tot = 0.0;
  for (const Atom& a : atoms) {
    if (positive_support && !(a.x > 0.0))
      throw InvalidArgument("discrete: atom value must be positive");
    if (!std::isfinite(a.x)) throw InvalidArgument("discrete: non-finite atom");
    if (a.p < 0.0) throw InvalidArgument("discrete: negative probability");
    tot += a.p;
  }
  if (std::abs(tot - 1.0) > 1e-12)
    throw InvalidArgument("discrete: probabilities must sum to 1 within 1e-12");
}

double discrete_pick(const std::vector<Atom>& atoms, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  for (const Atom& a : atoms) {
    acc += a.p;
    if (u < acc) return a.x;
  }
  return atoms.back().x;
}

// int_h^1 ((1-t)/t)^s dt after t = 1 - w^2: int_0^{sqrt(1-h)} 2 w^{2s+1} (1-w^2)^{-s} dw.
// Smooth and bounded for s >= -0.5.
double ratio_uniform_integral(double h, double s) {
  double w1 = std::sqrt(1.0 - h);
  return adaptive_simpson(
      [s](double w) {
        double t = 1.0 - w * w;
        return 2.0 * std::pow(w, 2.0 * s + 1.0) * std::pow(t, -s);
      },
      0.0, w1);
}

}  // namespace

void validate(const DistSpec& d) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          if (!(v.value > 0.0) || !std::isfinite(v.value))
            throw InvalidArgument("point_mass: value must be positive");
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          if (!(v.lo > 0.0) || !(v.hi > v.lo) || !std::isfinite(v.hi))
            throw InvalidArgument("uniform: need 0 < lo < hi");
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          if (!(v.sigma >= 0.0) || !std::isfinite(v.mu) || !std::isfinite(v.sigma))
            throw InvalidArgument("log_normal: sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          check_atoms(v.atoms, true);
        } else if constexpr (std::is_same_v<T, ExpNegGaussian>) {
          if (!(v.sigma >= 0.0) || !std::isfinite(v.mu) || !std::isfinite(v.sigma))
            throw InvalidArgument("exp_neg_gaussian: sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          if (!(v.h > 0.0) || !(v.h < 1.0))
            throw InvalidArgument("ratio_uniform: h must be in (0,1)");
        } else if constexpr (std::is_same_v<T, RecipUniform>) {
          if (!(v.c > 0.0) || !(v.h > 0.0) || !(v.h < 1.0))
            throw InvalidArgument("recip_uniform: need c > 0 and h in (0,1)");
        }
      },
      d);
}

double moment(const DistSpec& d, double s) {
  if (s == 0.0) return 1.0;
  return std::visit(
      [s](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return std::pow(v.value, s);
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          if (s == -1.0) return std::log(v.hi / v.lo) / (v.hi - v.lo);
          return (std::pow(v.hi, s + 1.0) - std::pow(v.lo, s + 1.0)) /
                 ((v.hi - v.lo) * (s + 1.0));
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          return std::exp(s * v.mu + 0.5 * s * s * v.sigma * v.sigma);
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          double m = 0.0;
          for (const Atom& a : v.atoms) m += a.p * std::pow(a.x, s);
          return m;
        } else if constexpr (std::is_same_v<T, ExpNegGaussian>) {
          return std::exp(-s * v.mu + 0.5 * s * s * v.sigma * v.sigma);
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          if (s < -0.5)
            throw DomainError(
                "ratio_uniform: moments evaluated only for s >= -0.5");
          if (s == 1.0) return (-std::log(v.h)) / (1.0 - v.h) - 1.0;
          return ratio_uniform_integral(v.h, s) / (1.0 - v.h);
        } else {  // RecipUniform
          if (s == 1.0)
            return (-std::log(v.h)) / (v.c * (1.0 - v.h));
          return std::pow(v.c, -s) * (1.0 - std::pow(v.h, 1.0 - s)) /
                 ((1.0 - v.h) * (1.0 - s));
        }
      },
      d);
}

double moment_by_quadrature(const DistSpec& d, double s) {
  if (s == 0.0) return 1.0;
  return std::visit(
      [s](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return adaptive_simpson([s](double t) { return std::pow(t, s); },
                                  v.lo, v.hi) /
                 (v.hi - v.lo);
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          if (s < -0.5)
            throw DomainError(
                "ratio_uniform: moments evaluated only for s >= -0.5");
          return ratio_uniform_integral(v.h, s) / (1.0 - v.h);
        } else if constexpr (std::is_same_v<T, RecipUniform>) {
          double c = v.c;
          return adaptive_simpson(
                     [s, c](double t) { return std::pow(c * t, -s); }, v.h,
                     1.0) /
                 (1.0 - v.h);
        } else {
          throw InvalidArgument(
              "moment_by_quadrature: only density families on a bounded "
              "interval are supported");
        }
      },
      d);
}

double domain_lower(const DistSpec& d) {
  if (std::holds_alternative<RatioUniform>(d)) return -1.0;
  return -kInf;
}

double sample(const DistSpec& d, Rng& rng) {
  return std::visit(
      [&rng](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          return rng.uniform(v.lo, v.hi);
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          return std::exp(v.mu + v.sigma * rng.normal());
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          return discrete_pick(v.atoms, rng);
        } else if constexpr (std::is_same_v<T, ExpNegGaussian>) {
          return std::exp(-(v.mu + v.sigma * rng.normal()));
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          double eta = rng.uniform(v.h, 1.0);
          return (1.0 - eta) / eta;
        } else {  // RecipUniform
          double eta = rng.uniform(v.h, 1.0);
          return 1.0 / (v.c * eta);
        }
      },
      d);
}

TailFacts tail_facts(const DistSpec& d) {
  // point_mass / uniform(lo>0) / discrete / recip_uniform: support compactly
  // inside (0, inf), both moments finite.
  // log_normal, exp_neg_gaussian: log xi is Gaussian; E|log xi| and
  // E|xi log xi| are Gaussian-integral finite.
  // ratio_uniform: xi in [0, (1-h)/h] with an integrable log singularity at
  // xi=0 (density of eta is bounded), and xi log xi -> 0 there.
  (void)d;
  return TailFacts{true, true};
}

std::string kind_name(const DistSpec& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointMass>) return "point_mass";
        if constexpr (std::is_same_v<T, UniformDist>) return "uniform";
        if constexpr (std::is_same_v<T, LogNormalDist>) return "log_normal";
        if constexpr (std::is_same_v<T, DiscreteDist>) return "discrete";
        if constexpr (std::is_same_v<T, ExpNegGaussian>)
          return "exp_neg_gaussian";
        if constexpr (std::is_same_v<T, RatioUniform>) return "ratio_uniform";
        return "recip_uniform";
      },
      d);
}

bool dist_equal(const DistSpec& a, const DistSpec& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& va) -> bool {
        using T = std::decay_t<decltype(va)>;
        const auto& vb = std::get<T>(b);
        if constexpr (std::is_same_v<T, PointMass>) {
          return va.value == vb.value;
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          return va.lo == vb.lo && va.hi == vb.hi;
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          return va.mu == vb.mu && va.sigma == vb.sigma;
        } else if constexpr (std::is_same_v<T, DiscreteDist>) {
          if (va.atoms.size() != vb.atoms.size()) return false;
          for (std::size_t i = 0; i < va.atoms.size(); ++i)
            if (va.atoms[i].x != vb.atoms[i].x || va.atoms[i].p != vb.atoms[i].p)
              return false;
          return true;
        } else if constexpr (std::is_same_v<T, ExpNegGaussian>) {
          return va.mu == vb.mu && va.sigma == vb.sigma;
        } else if constexpr (std::is_same_v<T, RatioUniform>) {
          return va.h == vb.h;
        } else {
          return va.c == vb.c && va.h == vb.h;
        }
      },
      a);
}

// --- step laws -----------------------------------------------------------

void validate(const StepSpec& d) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) {
          if (!(v.sigma >= 0.0) || !std::isfinite(v.mu) || !std::isfinite(v.sigma))
            throw InvalidArgument("normal: sigma must be >= 0");
        } else if constexpr (std::is_same_v<T, PointStep>) {
          if (!std::isfinite(v.value))
            throw InvalidArgument("point_mass step: non-finite value");
        } else if constexpr (std::is_same_v<T, ShiftedExpStep>) {
          if (!(v.rate > 0.0) || !std::isfinite(v.shift))
            throw InvalidArgument("shifted_exponential: rate must be > 0");
        } else {
          check_atoms(v.atoms, false);
        }
      },
      d);
}

double step_moment(const StepSpec& d, double s) {
  if (s == 0.0) return 1.0;
  return std::visit(
      [s](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) {
          return std::exp(-s * v.mu + 0.5 * s * s * v.sigma * v.sigma);
        } else if constexpr (std::is_same_v<T, PointStep>) {
          return std::exp(-s * v.value);
        } else if constexpr (std::is_same_v<T, ShiftedExpStep>) {
          if (s <= -v.rate)
            throw DomainError("shifted_exponential: moment needs s > -rate");
          return std::exp(-s * v.shift) * v.rate / (v.rate + s);
        } else {
          double m = 0.0;
          for (const Atom& a : v.atoms) m += a.p * std::exp(-s * a.x);
          return m;
        }
      },
      d);
}

double sample_step(const StepSpec& d, Rng& rng) {
  return std::visit(
      [&rng](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) {
          return v.mu + v.sigma * rng.normal();
        } else if constexpr (std::is_same_v<T, PointStep>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, ShiftedExpStep>) {
          return v.shift - std::log1p(-rng.uniform01()) / v.rate;
        } else {
          return discrete_pick(v.atoms, rng);
        }
      },
      d);
}

std::optional<DistSpec> step_label_law(const StepSpec& d) {
  return std::visit(
      [](const auto& v) -> std::optional<DistSpec> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) {
          return DistSpec{ExpNegGaussian{v.mu, v.sigma}};
        } else if constexpr (std::is_same_v<T, PointStep>) {
          return DistSpec{PointMass{std::exp(-v.value)}};
        } else if constexpr (std::is_same_v<T, DiscreteStep>) {
          DiscreteDist out;
          out.atoms.reserve(v.atoms.size());
          for (const Atom& a : v.atoms)
            out.atoms.push_back(Atom{std::exp(-a.x), a.p});
          return DistSpec{out};
        } else {
          return std::nullopt;  // exp(-eta) is a power law, not in the catalogue
        }
      },
      d);
}

std::string kind_name(const StepSpec& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalStep>) return "normal";
        if constexpr (std::is_same_v<T, PointStep>) return "point_mass";
        if constexpr (std::is_same_v<T, ShiftedExpStep>)
          return "shifted_exponential";
        return "discrete";
      },
      d);
}

}  // namespace coltree
