#include "treesim.hpp"

#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"
#include "spectral.hpp"
#include "stats.hpp"

namespace coltree {

namespace {

double pow_s(double z, double s) {
  if (s == 1.0) return z;
  if (s == 0.0) return 1.0;
  return std::pow(z, s);
}

// One generation of the frontier walk. Per parent: Fisher-Yates permutation
// of child colours (b - 1 bounded draws), then one colour-ordered row of
// labels; child k receives the label of its permuted colour. Every consumer
// of tree randomness in this codebase uses exactly this draw discipline so
// that runs sharing a seed stay comparable draw for draw.
void grow_level(const EnvSpec& env, const std::vector<int>& colors,
                const std::vector<double>& zetas, Rng& rng,
                std::vector<int>& next_colors, std::vector<double>& next_zetas) {
  int b = env.b;
  next_colors.clear();
  next_zetas.clear();
  next_colors.reserve(colors.size() * static_cast<std::size_t>(b));
  next_zetas.reserve(colors.size() * static_cast<std::size_t>(b));
  int perm[17];
  double row[16];
  for (std::size_t q = 0; q < colors.size(); ++q) {
    for (int k = 0; k < b; ++k) perm[k] = k + 1;
    for (int k = b - 1; k >= 1; --k) {
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
      std::swap(perm[k], perm[j]);
    }
    sample_row(env, colors[q], rng, std::span<double>(row, static_cast<std::size_t>(b)));
    for (int k = 0; k < b; ++k) {
      next_colors.push_back(perm[k]);
      next_zetas.push_back(zetas[q] * row[perm[k] - 1]);
    }
  }
}

}  // namespace

long long tree_vertex_count(int b, int depth) {
  long long total = 1;
  long long level = 1;
  for (int n = 0; n < depth; ++n) {
    if (level > (1LL << 60) / b) return 1LL << 62;  // saturate, caller errors out
    level *= b;
    total += level;
  }
  return total;
}

void walk_tree_levels(
    const EnvSpec& env, int depth, Rng& rng,
    const std::function<void(int, const std::vector<int>&,
                             const std::vector<double>&)>& per_level,
    long long vertex_budget) {
  if (depth < 0) throw InvalidArgument("walk_tree_levels: negative depth");
  if (tree_vertex_count(env.b, depth) > vertex_budget)
    throw BudgetError("walk_tree_levels: vertex budget exceeded");
  std::vector<int> colors{env.root_color};
  std::vector<double> zetas{1.0};
  per_level(0, colors, zetas);
  std::vector<int> next_colors;
  std::vector<double> next_zetas;
  for (int n = 0; n < depth; ++n) {
    grow_level(env, colors, zetas, rng, next_colors, next_zetas);
    colors.swap(next_colors);
    zetas.swap(next_zetas);
    per_level(n + 1, colors, zetas);
  }
}

TreeTrial sample_tree(const EnvSpec& env, int depth, std::uint64_t seed,
                      std::uint64_t trial_index, double s_probe,
                      double x_probe) {
  TreeTrial t;
  t.b = env.b;
  t.depth = depth;
  t.seed = seed;
  t.trial_index = trial_index;
  t.s_probe = s_probe;
  t.x_probe = x_probe;
  long long total = tree_vertex_count(env.b, depth);
  if (total > 10000000) throw BudgetError("sample_tree: vertex budget exceeded");
  t.color.reserve(static_cast<std::size_t>(total));
  t.zeta.reserve(static_cast<std::size_t>(total));
  t.sum_zeta.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  t.sum_zeta_s.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  t.count_exceed.assign(static_cast<std::size_t>(depth) + 1, 0);
  Rng rng(seed, trial_index);
  walk_tree_levels(
      env, depth, rng,
      [&t, s_probe, x_probe](int n, const std::vector<int>& colors,
                             const std::vector<double>& zetas) {
        std::size_t ln = static_cast<std::size_t>(n);
        for (std::size_t q = 0; q < colors.size(); ++q) {
          t.color.push_back(colors[q]);
          t.zeta.push_back(zetas[q]);
          t.sum_zeta[ln] += zetas[q];
          t.sum_zeta_s[ln] += pow_s(zetas[q], s_probe);
          if (zetas[q] > x_probe) ++t.count_exceed[ln];
        }
      });
  return t;
}

double moment_oracle(const EnvSpec& env, double s, int n, int root_color) {
  if (n < 0) throw InvalidArgument("moment_oracle: negative level");
  if (root_color < 1 || root_color > env.b)
    throw InvalidArgument("moment_oracle: root colour out of range");
  if (n == 0) return 1.0;
  Matrix m = moment_matrix(env, s);
  std::vector<double> w(static_cast<std::size_t>(env.b), 1.0);
  for (int k = 0; k < n; ++k) w = matvec(m, w);
  return w[static_cast<std::size_t>(root_color - 1)];
}

LevelStats estimate_level_sums(const EnvSpec& env, double s, int depth,
                               long long trials, std::uint64_t seed) {
  if (trials < 2) throw InvalidArgument("estimate_level_sums: need >= 2 trials");
  std::vector<RunningStats> acc(static_cast<std::size_t>(depth) + 1);
  std::vector<double> level_sum(static_cast<std::size_t>(depth) + 1);
  for (long long t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::fill(level_sum.begin(), level_sum.end(), 0.0);
    walk_tree_levels(env, depth, rng,
                     [&level_sum, s](int n, const std::vector<int>&,
                                     const std::vector<double>& zetas) {
                       double tot = 0.0;
                       for (double z : zetas) tot += pow_s(z, s);
                       level_sum[static_cast<std::size_t>(n)] = tot;
                     });
    for (std::size_t n = 0; n < level_sum.size(); ++n) acc[n].add(level_sum[n]);
  }
  LevelStats out;
  out.s = s;
  out.trials = trials;
  for (int n = 0; n <= depth; ++n) {
    out.empirical_mean.push_back(acc[static_cast<std::size_t>(n)].mean);
    out.std_err.push_back(acc[static_cast<std::size_t>(n)].std_err());
    out.oracle.push_back(moment_oracle(env, s, n, env.root_color));
  }
  return out;
}

YEstimate estimate_Y(const EnvSpec& env, int depth, long long trials,
                     std::uint64_t seed) {
  YEstimate out;
  std::vector<std::vector<double>> level_sums(
      static_cast<std::size_t>(depth) + 1);
  for (long long t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::vector<double> partial;
    double running = 0.0;
    walk_tree_levels(env, depth, rng,
                     [&](int n, const std::vector<int>&,
                         const std::vector<double>& zetas) {
                       double tot = 0.0;
                       for (double z : zetas) tot += z;
                       running += tot;
                       partial.push_back(running);
                       level_sums[static_cast<std::size_t>(n)].push_back(tot);
                     });
    out.partial_sums.push_back(std::move(partial));
  }
  for (int n = 0; n <= depth; ++n)
    out.level_median.push_back(median_of(level_sums[static_cast<std::size_t>(n)]));
  for (int n = 0; n < depth; ++n)
    out.median_ratio.push_back(out.level_median[static_cast<std::size_t>(n) + 1] /
                               out.level_median[static_cast<std::size_t>(n)]);
  std::vector<double> late;
  for (std::size_t n = 4; n < out.median_ratio.size(); ++n)
    late.push_back(out.median_ratio[n]);
  if (late.empty()) late = out.median_ratio;
  out.median_growth_ratio = late.empty() ? 0.0 : median_of(late);
  return out;
}

std::vector<std::vector<long long>> count_exceedances(const EnvSpec& env,
                                                      double x, int depth,
                                                      long long trials,
                                                      std::uint64_t seed) {
  if (!(x > 0.0)) throw InvalidArgument("count_exceedances: need x > 0");
  std::vector<std::vector<long long>> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (long long t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::vector<long long> counts(static_cast<std::size_t>(depth) + 1, 0);
    walk_tree_levels(env, depth, rng,
                     [&counts, x](int n, const std::vector<int>&,
                                  const std::vector<double>& zetas) {
                       long long c = 0;
                       for (double z : zetas)
                         if (z > x) ++c;
                       counts[static_cast<std::size_t>(n)] = c;
                     });
    out.push_back(std::move(counts));
  }
  return out;
}

PathTail path_tail_probability(const EnvSpec& env, int n, double log_a,
                               long long trials, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("path_tail_probability: need n >= 1");
  if (trials < 1) throw InvalidArgument("path_tail_probability: need trials >= 1");
  double threshold = static_cast<double>(n) * log_a;
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    int color = env.root_color;
    double log_zeta = 0.0;
    for (int k = 0; k < n; ++k) {
      int next = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(env.b)));
      log_zeta += std::log(sample(env.entry(color, next), rng));
      color = next;
    }
    if (log_zeta >= threshold) ++hits;
  }
  PathTail out;
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.std_err = std::sqrt(out.empirical * (1.0 - out.empirical) /
                          static_cast<double>(trials));
  RatePoint rp = rate_function(env, log_a);
  out.rate = rp.value;
  out.rate_finite = rp.finite;
  out.predicted = rp.finite ? std::exp(-static_cast<double>(n) * rp.value) : 0.0;
  return out;
}

EmbeddingChoice optimize_embedding(const EnvSpec& env) {
  EmbeddingChoice out;
  Lambda1Result l1 = lambda1(env);
  out.lambda1 = l1.value;
  out.s1_star = l1.argmin_s;
  const double h = 1e-5;
  double deriv = (std::log(rho_of(env, l1.argmin_s + h)) -
                  std::log(rho_of(env, l1.argmin_s - h))) /
                 (2.0 * h);
  out.y_star = std::min(1.0, std::exp(deriv));
  return out;
}

SurvivalResult embedded_survival(const EnvSpec& env, double y, int n,
                                 int generations, long long trials,
                                 std::uint64_t seed, int member_cap) {
  if (!(y > 0.0)) throw InvalidArgument("embedded_survival: need y > 0");
  if (n < 1 || generations < 1)
    throw InvalidArgument("embedded_survival: need n, generations >= 1");
  if (tree_vertex_count(env.b, n) > 1000000)
    throw BudgetError("embedded_survival: block size exceeds budget");
  double block_threshold = std::pow(y, n);
  SurvivalResult out;
  out.alive_by_generation.assign(static_cast<std::size_t>(generations), 0.0);
  std::vector<int> survivors, next_survivors;
  std::vector<int> colors, next_colors;
  std::vector<double> zetas, next_zetas;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    survivors.assign(1, env.root_color);
    for (int g = 0; g < generations; ++g) {
      next_survivors.clear();
      for (int cu : survivors) {
        if (static_cast<int>(next_survivors.size()) >= member_cap) {
          out.member_cap_hit = true;
          break;
        }
        colors.assign(1, cu);
        zetas.assign(1, 1.0);
        for (int lvl = 0; lvl < n; ++lvl) {
          grow_level(env, colors, zetas, rng, next_colors, next_zetas);
          colors.swap(next_colors);
          zetas.swap(next_zetas);
        }
        for (std::size_t q = 0; q < colors.size(); ++q)
          if (zetas[q] >= block_threshold) next_survivors.push_back(colors[q]);
      }
      if (static_cast<int>(next_survivors.size()) > member_cap) {
        next_survivors.resize(static_cast<std::size_t>(member_cap));
        out.member_cap_hit = true;
      }
      survivors.swap(next_survivors);
      if (!survivors.empty()) out.alive_by_generation[static_cast<std::size_t>(g)] += 1.0;
      if (survivors.empty()) break;
    }
    if (!survivors.empty()) out.frequency += 1.0;
  }
  out.frequency /= static_cast<double>(trials);
  for (double& a : out.alive_by_generation) a /= static_cast<double>(trials);
  return out;
}

}  // namespace coltree
