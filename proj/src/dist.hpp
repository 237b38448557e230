#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace coltree {

// Edge-label distributions. Labels are strictly positive; the catalogue is a
// closed set and every member knows the interval D of moment orders s with
// E xi^s < infinity.

struct Atom {
  double x;
  double p;
};

struct PointMass {
  double value;  // > 0
};

struct UniformDist {
  double lo, hi;  // 0 < lo < hi
};

struct LogNormalDist {
  double mu, sigma;  // sigma >= 0; xi = exp(mu + sigma N)
};

struct DiscreteDist {
  std::vector<Atom> atoms;  // x > 0, p >= 0, sum p == 1 within 1e-12
};

// xi = exp(-eta), eta ~ Normal(mu, sigma^2); E xi^s = exp(-s mu + s^2 sigma^2 / 2).
struct ExpNegGaussian {
  double mu, sigma;  // sigma >= 0
};

// xi = (1 - eta)/eta, eta ~ Uniform[h, 1]; D = (-1, inf).
struct RatioUniform {
  double h;  // in (0,1)
};

// xi = 1/(c eta), eta ~ Uniform[h, 1].
struct RecipUniform {
  double c, h;  // c > 0, h in (0,1)
};

using DistSpec = std::variant<PointMass, UniformDist, LogNormalDist,
                              DiscreteDist, ExpNegGaussian, RatioUniform,
                              RecipUniform>;

// Throws InvalidArgument on out-of-range parameters.
void validate(const DistSpec& d);

// E xi^s. Closed form everywhere except ratio_uniform, which integrates by
// adaptive Simpson after the substitution u = 1 - t (endpoint singularity);
// its moments are only evaluated for s >= -0.5 (DomainError below that).
double moment(const DistSpec& d, double s);

// Quadrature path for the bounded-density families (uniform, ratio_uniform,
// recip_uniform); used to cross-check the closed forms.
double moment_by_quadrature(const DistSpec& d, double s);

// Lower end of the maths domain D (moments infinite at or below this).
double domain_lower(const DistSpec& d);

double sample(const DistSpec& d, Rng& rng);

// Integrability facts per family used by the hypothesis check: whether
// E|log xi| and E|xi log xi| are finite. True across the catalogue (bounded
// supports away from 0 modulo an integrable log singularity, or Gaussian
// exponents), recorded per family to keep the reasoning explicit.
struct TailFacts {
  bool abs_log_finite;
  bool xi_log_finite;
};
TailFacts tail_facts(const DistSpec& d);

std::string kind_name(const DistSpec& d);

bool dist_equal(const DistSpec& a, const DistSpec& b);

// --- BRW step laws (displacements on R) ---------------------------------

struct NormalStep {
  double mu, sigma;  // sigma >= 0
};

struct PointStep {
  double value;  // any real
};

// eta = shift + Exp(rate); E exp(-s eta) finite for s > -rate.
struct ShiftedExpStep {
  double shift, rate;  // rate > 0
};

struct DiscreteStep {
  std::vector<Atom> atoms;  // x any real, p >= 0, sum p == 1 within 1e-12
};

using StepSpec =
    std::variant<NormalStep, PointStep, ShiftedExpStep, DiscreteStep>;

void validate(const StepSpec& d);

// E exp(-s eta); DomainError outside the step law's domain.
double step_moment(const StepSpec& d, double s);

double sample_step(const StepSpec& d, Rng& rng);

// Label law of exp(-eta) when it exists in the label catalogue; nullopt for
// shifted_exponential. When defined, sampling the label consumes exactly the
// same variates as sampling the step, and label == exp(-step) pointwise.
std::optional<DistSpec> step_label_law(const StepSpec& d);

std::string kind_name(const StepSpec& d);

}  // namespace coltree
