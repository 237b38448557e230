#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dist.hpp"
#include "linalg.hpp"

namespace coltree {

// --- per-vertex jump laws for the walk-in-random-environment model -------

// p = (p_down, p_child_1, ..., p_child_b): first the move toward the root
// (a self-loop at the root itself), then one entry per child slot.
struct FixedJump {
  std::vector<double> p;  // size b+1, entries > 0, sum == 1 within 1e-12
};

// b = 2 mechanism: p = (a*eta, a*(1-eta), 1-a) with eta ~ Uniform[h, 1].
// Child slot 1 carries the a*(1-eta) branch, slot 2 the constant branch.
struct EtaJump {
  double a;  // in (0,1)
  double h;  // in (0,1)
};

using JumpLaw = std::variant<FixedJump, EtaJump>;

struct RwreSpec {
  int b = 2;
  int root_color = 1;             // 1-based
  std::vector<JumpLaw> laws;      // one per colour
};

// --- environment on the coloured b-ary tree ------------------------------

enum class SiblingMode { Independent, RwreJoint };

// b^2 edge-label laws keyed by (parent colour, child colour), plus the
// sibling coupling. Under RwreJoint the entries are derived marginals of the
// per-vertex jump vector and one vector draw covers all b siblings.
struct EnvSpec {
  int b = 2;
  int root_color = 1;  // 1-based
  SiblingMode sibling_mode = SiblingMode::Independent;
  std::vector<DistSpec> entries;  // row-major, entries[(i-1)*b + (j-1)]
  std::shared_ptr<const RwreSpec> rwre;  // set iff sibling_mode == RwreJoint

  const DistSpec& entry(int i, int j) const {
    return entries[static_cast<std::size_t>(i - 1) * b + (j - 1)];
  }
};

// Strict JSON parsing; ParseError with a (row,col)-addressed message on any
// schema violation. See README for the schema.
EnvSpec parse_env(const std::string& json_text);
std::string env_to_json(const EnvSpec& env);

// Named environments, "name,k=v,...": etawalk (h), pointmass (b,c),
// lognormal (b,mu,sigma), uniform (b,lo,hi), expneg (b,mu,sigma).
EnvSpec builtin_env(const std::string& name_params);

// Named walk specs: etawalk (h), fixed (p=...:...:...).
RwreSpec builtin_rwre(const std::string& name_params);
RwreSpec parse_rwre(const std::string& json_text);
std::string rwre_to_json(const RwreSpec& spec);

// Marginal-label environment induced by a jump spec (joint sibling mode).
EnvSpec induced_env(const RwreSpec& spec);

// m(s) with entries E xi_ij^s; DomainError if any entry is non-finite.
Matrix moment_matrix(const EnvSpec& env, double s);

// One parent's b edge labels indexed by child colour (out[j-1] for colour j).
// Independent mode: one draw per entry, colour order. Joint mode: one jump
// vector draw, labels are the sibling ratios.
void sample_row(const EnvSpec& env, int parent_color, Rng& rng,
                std::span<double> out);

// Draw a jump vector for a colour, (p_down, p_child_1, ..., p_child_b).
void sample_jump(const RwreSpec& spec, int color, Rng& rng,
                 std::span<double> out);

// Hypotheses for the almost-sure dichotomy: [0,1] inside every entry's
// moment domain, 0 interior, and both E|log xi| and E|xi log xi| finite.
struct RegularityReport {
  bool unit_interval_in_domain;
  bool zero_interior;
  bool abs_log_finite;
  bool xi_log_finite;
  bool ok() const {
    return unit_interval_in_domain && zero_interior && abs_log_finite &&
           xi_log_finite;
  }
};
RegularityReport check_regularity(const EnvSpec& env);

// Representative environments across the whole label catalogue (used by
// property suites and exposed for experimentation).
std::vector<std::pair<std::string, EnvSpec>> catalogue_envs();

}  // namespace coltree
