#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dist.hpp"
#include "env.hpp"
#include "linalg.hpp"
#include "spectral.hpp"

namespace coltree {

// Multi-type branching walk on the line: a type-i particle spawns one child
// of every type j, displaced by an independent draw of steps (i,j).
struct BrwSpec {
  int b = 2;
  int start_type = 1;
  std::vector<StepSpec> steps;  // b x b, row-major

  const StepSpec& step(int i, int j) const {  // 1-based
    return steps[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(b) +
                 static_cast<std::size_t>(j - 1)];
  }
};

BrwSpec parse_brw(const std::string& json_text);
std::string brw_to_json(const BrwSpec& spec);

// Builtins: "normal01" (b=2, all steps Normal(0,1)),
// "normal,b=,mu=,sigma=", "pointmass,b=,c=".
BrwSpec builtin_brw(const std::string& name_params);

// Entries E exp(-s eta_ij).
Matrix brw_moment_matrix(const BrwSpec& spec, double s);
MomentFn brw_moment_fn(const BrwSpec& spec);

// Label environment with xi = exp(-eta) when every step law maps into the
// label catalogue (everything except shifted_exponential); the induced env
// consumes the same variates per draw as the step laws do.
std::optional<EnvSpec> brw_env(const BrwSpec& spec);

SpeedResult brw_speed(const BrwSpec& spec, double s_max_bound = 64.0);

struct BrwGenRow {
  int generation = 0;
  double mu = 0.0;          // exact minimum over that generation's children
  long long frontier = 0;   // size kept after pruning
  bool pruned = false;      // window prune dropped something this generation
  bool truncated = false;   // frontier cap dropped something this generation
};

struct BrwRun {
  std::vector<BrwGenRow> trace;
  double mu_final = 0.0;
  // True while no discarded particle was within `window` of the running
  // minimum; only the frontier cap can break it, the window prune cannot.
  bool sound = true;
};

BrwRun simulate_brw(const BrwSpec& spec, int t_max, std::uint64_t seed,
                    double window, long long max_frontier = 1000000);

struct SpeedEstimate {
  double mean_mu_over_t = 0.0;
  double std_err = 0.0;
  double x0 = 0.0;
  bool degenerate = false;
  bool all_sound = true;
  std::vector<double> mu_over_t;  // per trial
  std::vector<bool> sound;        // per trial
};

SpeedEstimate speed_estimate(const BrwSpec& spec, int t_max, long long trials,
                             std::uint64_t seed, double window,
                             long long max_frontier = 1000000);

// Fraction of trials whose minimum stays >= 0 over generations
// [t_max - trailing, t_max].
double positivity_frequency(const BrwSpec& spec, int t_max, long long trials,
                            std::uint64_t seed, int trailing = 5,
                            double window = 30.0,
                            long long max_frontier = 1000000);

// Passage-time reach counts: per trial and level, the number of vertices
// whose root path time sum is <= t. Mirrors the coloured-tree walker's draw
// discipline so runs sharing a seed pair off against exceedance counts.
std::vector<std::vector<long long>> fpp_reach(const BrwSpec& spec, double t,
                                              int depth, long long trials,
                                              std::uint64_t seed);

}  // namespace coltree
