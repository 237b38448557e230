#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "env.hpp"
#include "rng.hpp"

namespace coltree {

// Fully realized jump environment on the truncated tree, heap layout:
// vertex 0 is the root, child k of vertex v is b*v + 1 + k, so a vertex's
// parent always precedes it. p is flattened with stride b + 1 per vertex,
// component order (down, child 1, ..., child b); at the root "down" is the
// reflexive self-move.
struct RealizedEnv {
  int b = 0;
  int depth = 0;
  int root_color = 1;
  std::vector<int> color;  // per vertex
  std::vector<double> p;   // (b + 1) per vertex

  long long vertex_count() const { return static_cast<long long>(color.size()); }
  double prob(long long v, int component) const {
    return p[static_cast<std::size_t>(v) * (static_cast<std::size_t>(b) + 1) +
             static_cast<std::size_t>(component)];
  }
  long long parent_of(long long v) const { return (v - 1) / b; }
  long long child_of(long long v, int k) const {
    return static_cast<long long>(b) * v + 1 + k;
  }
  int level_of(long long v) const;
};

RealizedEnv sample_environment(const RwreSpec& spec, int depth,
                               std::uint64_t seed);

// Edge conductances in the same vertex indexing: entry v > 0 is the
// conductance of the edge (parent(v), v); entry 0 is the root's reflexive
// self-move, pinned at 1 so the telescoping products are anchored.
std::vector<double> conductances(const RealizedEnv& re);

// Total conductance C_x at each vertex of the truncated tree (leaves keep
// only the parent edge; the root keeps its self-move).
std::vector<double> conductance_weights(const RealizedEnv& re,
                                        const std::vector<double>& cond);

// max over non-leaf vertices and their moves of |C_uv / C_u - p_uv|.
double detailed_balance_max_error(const RealizedEnv& re,
                                  const std::vector<double>& cond);

// Exact stationary law of the finite chain with reflecting leaves, by
// direct solve of the balance equations; sums to 1.
std::vector<double> stationary_truncated(const RealizedEnv& re);

struct WalkSummary {
  long long steps = 0;
  long long root_visits = 0;  // time steps spent at the root, start included
  int max_depth = 0;
  int final_depth = 0;
  std::vector<long long> occupation_by_depth;  // depths 0..cut_depth
  long long beyond_cut = 0;  // time steps at depths > cut_depth
};

WalkSummary simulate_walk(const RwreSpec& spec, long long steps,
                          std::uint64_t seed, int cut_depth = 32);

struct SweepResult {
  std::vector<std::pair<double, double>> rows;  // (h, lambda1)
  double root = 0.0;
};

SweepResult hcr_sweep(const std::vector<double>& h_grid);

}  // namespace coltree
