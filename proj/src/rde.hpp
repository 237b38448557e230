#pragma once

#include <cstdint>
#include <vector>

#include "classify.hpp"
#include "env.hpp"

namespace coltree {

struct RdeIterRow {
  int iteration = 0;
  int component = 0;  // 1-based colour
  double mean = 0.0;
  double ks_to_previous = 0.0;
};

struct RdeTrace {
  std::vector<RdeIterRow> rows;
  std::vector<std::vector<double>> pools;  // final pools, one per component
  bool diverged = false;
  int diverged_iteration = -1;  // first iteration whose median tripped the sentinel
};

// Population dynamics for the affine fixed-point map: pools start at the
// constant 1; each new sample of component i is 1 + sum_j xi_ij * Y_j with
// one fresh label row and one pick per component pool. Stops early when any
// pool's median exceeds 1e15.
RdeTrace rde_iterate(const EnvSpec& env, long long pool_size, int iterations,
                     std::uint64_t seed);

// Mean vector (I - m(1))^{-1} e; DomainError("no finite mean") when the
// Perron root of m(1) is >= 1.
std::vector<double> rde_mean_system(const EnvSpec& env);

RdeVerdict rde_existence(const EnvSpec& env, double eps_critical = 1e-4);

}  // namespace coltree
