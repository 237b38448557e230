#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "env.hpp"
#include "rng.hpp"

namespace coltree {

// Level order: vertex 0 is the root, level n occupies indices
// [(b^n - 1)/(b - 1), (b^{n+1} - 1)/(b - 1)); child k of the q-th vertex of
// level n is the (q*b + k)-th vertex of level n + 1.
struct TreeTrial {
  int b = 0;
  int depth = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  double s_probe = 1.0;
  double x_probe = 1.0;
  std::vector<int> color;    // per vertex
  std::vector<double> zeta;  // per vertex, zeta[0] = 1
  std::vector<double> sum_zeta;          // per level
  std::vector<double> sum_zeta_s;        // per level, probe s
  std::vector<long long> count_exceed;   // per level, zeta > x_probe
};

struct LevelStats {
  double s = 1.0;
  long long trials = 0;
  std::vector<double> empirical_mean;  // per level, mean of sum zeta^s
  std::vector<double> std_err;         // per level
  std::vector<double> oracle;          // matrix-power contraction
};

struct YEstimate {
  std::vector<std::vector<double>> partial_sums;  // [trial][level] cumulative
  std::vector<double> level_median;               // median level sum across trials
  std::vector<double> median_ratio;               // successive-median ratios
  double median_growth_ratio = 0.0;  // median of median_ratio over levels >= 4
};

struct PathTail {
  double empirical = 0.0;
  double std_err = 0.0;
  double predicted = 0.0;  // exp(-n * rate(log_a)); 0 when the rate is +inf
  double rate = 0.0;
  bool rate_finite = true;
};

struct EmbeddingChoice {
  double y_star = 1.0;  // threshold base from the max-min saddle
  double s1_star = 0.0;
  double lambda1 = 0.0;
};

struct SurvivalResult {
  double frequency = 0.0;       // fraction of trials alive at the last generation
  std::vector<double> alive_by_generation;
  bool member_cap_hit = false;  // survivors were truncated at least once
};

long long tree_vertex_count(int b, int depth);

// Walks a sampled tree level by level, holding one level in memory.
// per_level is called for n = 0..depth with that level's colours and
// path products; level 0 is the root (colour root_color, zeta 1).
void walk_tree_levels(
    const EnvSpec& env, int depth, Rng& rng,
    const std::function<void(int, const std::vector<int>&,
                             const std::vector<double>&)>& per_level,
    long long vertex_budget = 10000000);

TreeTrial sample_tree(const EnvSpec& env, int depth, std::uint64_t seed,
                      std::uint64_t trial_index, double s_probe = 1.0,
                      double x_probe = 1.0);

// Exact expectation of sum over level-n vertices of zeta^s: the root-colour
// row of the n-th moment-matrix power contracted against the all-ones vector.
double moment_oracle(const EnvSpec& env, double s, int n, int root_color);

LevelStats estimate_level_sums(const EnvSpec& env, double s, int depth,
                               long long trials, std::uint64_t seed);

YEstimate estimate_Y(const EnvSpec& env, int depth, long long trials,
                     std::uint64_t seed);

std::vector<std::vector<long long>> count_exceedances(const EnvSpec& env,
                                                      double x, int depth,
                                                      long long trials,
                                                      std::uint64_t seed);

// Single root-to-depth-n path with i.i.d. uniform colours below the root.
PathTail path_tail_probability(const EnvSpec& env, int n, double log_a,
                               long long trials, std::uint64_t seed);

// Saddle of the map (y, s) -> rho(s) y^{1-s}: y* = exp(d log rho / ds at
// the [0,1]-argmin), clamped to (0, 1].
EmbeddingChoice optimize_embedding(const EnvSpec& env);

// Block-threshold embedded process: generation j holds the level-(j*n)
// descendants w of generation j-1 members u with block product
// zeta[u,w] >= y^n. Survivor lists are truncated at member_cap (which can
// only lower the survival frequency).
SurvivalResult embedded_survival(const EnvSpec& env, double y, int n,
                                 int generations, long long trials,
                                 std::uint64_t seed, int member_cap = 512);

}  // namespace coltree
