#include "rde.hpp"

#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"

namespace coltree {

RdeTrace rde_iterate(const EnvSpec& env, long long pool_size, int iterations,
                     std::uint64_t seed) {
  if (env.sibling_mode != SiblingMode::Independent)
    throw InvalidArgument(
        "rde_iterate: the fixed-point map needs independent sibling labels");
  if (pool_size < 2) throw InvalidArgument("rde_iterate: pool_size must be >= 2");
  if (iterations < 1) throw InvalidArgument("rde_iterate: iterations must be >= 1");
  int b = env.b;
  std::size_t p = static_cast<std::size_t>(pool_size);
  std::vector<std::vector<double>> prev(
      static_cast<std::size_t>(b), std::vector<double>(p, 1.0));
  std::vector<std::vector<double>> next(
      static_cast<std::size_t>(b), std::vector<double>(p, 0.0));
  RdeTrace out;
  Rng rng(seed);
  double row[16];
  for (int it = 1; it <= iterations; ++it) {
    for (int i = 0; i < b; ++i) {
      std::vector<double>& dst = next[static_cast<std::size_t>(i)];
      for (std::size_t m = 0; m < p; ++m) {
        for (int j = 0; j < b; ++j)
          row[j] = sample(env.entry(i + 1, j + 1), rng);
        double v = 1.0;
        for (int j = 0; j < b; ++j) {
          std::size_t pick =
              static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(pool_size)));
          v += row[j] * prev[static_cast<std::size_t>(j)][pick];
        }
        dst[m] = v;
      }
    }
    bool tripped = false;
    for (int i = 0; i < b; ++i) {
      RdeIterRow r;
      r.iteration = it;
      r.component = i + 1;
      double total = 0.0;
      for (double v : next[static_cast<std::size_t>(i)]) total += v;
      r.mean = total / static_cast<double>(pool_size);
      r.ks_to_previous = ks_two_sample(next[static_cast<std::size_t>(i)],
                                       prev[static_cast<std::size_t>(i)]);
      out.rows.push_back(r);
      if (median_of(next[static_cast<std::size_t>(i)]) > 1e15) tripped = true;
    }
    prev.swap(next);
    if (tripped) {
      out.diverged = true;
      out.diverged_iteration = it;
      break;
    }
  }
  out.pools = std::move(prev);
  return out;
}

std::vector<double> rde_mean_system(const EnvSpec& env) {
  Matrix m = moment_matrix(env, 1.0);
  double rho = perron(m).rho;
  if (!(rho < 1.0))
    throw DomainError("rde_mean_system: no finite mean (Perron root of m(1) is " +
                      std::to_string(rho) + " >= 1)");
  Matrix a(env.b);
  for (int i = 0; i < env.b; ++i)
    for (int j = 0; j < env.b; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - m(i, j);
  std::vector<double> e(static_cast<std::size_t>(env.b), 1.0);
  return gauss_solve(a, e);
}

RdeVerdict rde_existence(const EnvSpec& env, double eps_critical) {
  return classify(env, eps_critical).rde;
}

}  // namespace coltree
