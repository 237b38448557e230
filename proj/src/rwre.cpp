#include "rwre.hpp"

#include <algorithm>
#include <cmath>

#include "classify.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "treesim.hpp"

namespace coltree {

int RealizedEnv::level_of(long long v) const {
  int n = 0;
  while (v > 0) {
    v = (v - 1) / b;
    ++n;
  }
  return n;
}

RealizedEnv sample_environment(const RwreSpec& spec, int depth,
                               std::uint64_t seed) {
  if (depth < 0) throw InvalidArgument("sample_environment: negative depth");
  long long total = tree_vertex_count(spec.b, depth);
  if (total > 10000000)
    throw BudgetError("sample_environment: vertex budget exceeded");
  RealizedEnv re;
  re.b = spec.b;
  re.depth = depth;
  re.root_color = spec.root_color;
  re.color.assign(static_cast<std::size_t>(total), 0);
  re.p.assign(static_cast<std::size_t>(total) *
                  (static_cast<std::size_t>(spec.b) + 1),
              0.0);
  re.color[0] = spec.root_color;
  Rng rng(seed);
  long long interior_end = (total - 1) / spec.b;  // vertices with children
  int perm[17];
  for (long long v = 0; v < total; ++v) {
    sample_jump(spec, re.color[static_cast<std::size_t>(v)], rng,
                std::span<double>(
                    re.p.data() + static_cast<std::size_t>(v) *
                                      (static_cast<std::size_t>(spec.b) + 1),
                    static_cast<std::size_t>(spec.b) + 1));
    if (v < interior_end) {
      for (int k = 0; k < spec.b; ++k) perm[k] = k + 1;
      for (int k = spec.b - 1; k >= 1; --k) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
        std::swap(perm[k], perm[j]);
      }
      for (int k = 0; k < spec.b; ++k)
        re.color[static_cast<std::size_t>(re.child_of(v, k))] = perm[k];
    }
  }
  return re;
}

std::vector<double> conductances(const RealizedEnv& re) {
  long long total = re.vertex_count();
  std::vector<double> cond(static_cast<std::size_t>(total), 0.0);
  cond[0] = 1.0;
  for (long long v = 1; v < total; ++v) {
    long long u = re.parent_of(v);
    int slot = static_cast<int>(v - re.child_of(u, 0));
    cond[static_cast<std::size_t>(v)] = cond[static_cast<std::size_t>(u)] *
                                        re.prob(u, 1 + slot) / re.prob(u, 0);
  }
  return cond;
}

std::vector<double> conductance_weights(const RealizedEnv& re,
                                        const std::vector<double>& cond) {
  long long total = re.vertex_count();
  long long interior_end = (total - 1) / re.b;
  std::vector<double> cx(static_cast<std::size_t>(total), 0.0);
  for (long long v = 0; v < total; ++v) {
    double sum = cond[static_cast<std::size_t>(v)];  // parent edge / root self-move
    if (v < interior_end)
      for (int k = 0; k < re.b; ++k)
        sum += cond[static_cast<std::size_t>(re.child_of(v, k))];
    cx[static_cast<std::size_t>(v)] = sum;
  }
  return cx;
}

double detailed_balance_max_error(const RealizedEnv& re,
                                  const std::vector<double>& cond) {
  long long total = re.vertex_count();
  long long interior_end = (total - 1) / re.b;
  double worst = 0.0;
  for (long long v = 0; v < interior_end; ++v) {
    double cu = cond[static_cast<std::size_t>(v)];
    for (int k = 0; k < re.b; ++k)
      cu += cond[static_cast<std::size_t>(re.child_of(v, k))];
    worst = std::max(worst, std::abs(cond[static_cast<std::size_t>(v)] / cu -
                                     re.prob(v, 0)));
    for (int k = 0; k < re.b; ++k)
      worst = std::max(
          worst,
          std::abs(cond[static_cast<std::size_t>(re.child_of(v, k))] / cu -
                   re.prob(v, 1 + k)));
  }
  return worst;
}

std::vector<double> stationary_truncated(const RealizedEnv& re) {
  long long total = re.vertex_count();
  if (total > 4096)
    throw BudgetError("stationary_truncated: dense solve limited to 4096 states");
  int n = static_cast<int>(total);
  long long interior_end = (total - 1) / re.b;
  // A = P^T - I with the last row replaced by the normalization sum = 1.
  Matrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.0;
  auto add = [&a, n](long long from, long long to, double pr) {
    a(static_cast<int>(to), static_cast<int>(from)) += pr;
  };
  for (long long v = 0; v < total; ++v) {
    if (v == 0) {
      add(0, 0, re.prob(0, 0));  // reflexive move
      for (int k = 0; k < re.b; ++k) add(0, re.child_of(0, k), re.prob(0, 1 + k));
    } else if (v < interior_end) {
      add(v, re.parent_of(v), re.prob(v, 0));
      for (int k = 0; k < re.b; ++k) add(v, re.child_of(v, k), re.prob(v, 1 + k));
    } else {
      add(v, re.parent_of(v), 1.0);  // reflecting leaf
    }
  }
  for (int i = 0; i < n; ++i) a(i, i) -= 1.0;
  std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  rhs[static_cast<std::size_t>(n - 1)] = 1.0;
  return gauss_solve(a, rhs);
}

namespace {

// Lazily realized walk arena; nodes are created on first visit, drawing the
// jump vector and the children's colour permutation in creation order.
struct WalkArena {
  int b;
  const RwreSpec& spec;
  Rng& rng;
  std::vector<int> color;
  std::vector<int> parent;
  std::vector<int> depth;
  std::vector<int> children;      // b per node, -1 until realized
  std::vector<int> child_color;   // b per node
  std::vector<double> p;          // b + 1 per node

  WalkArena(const RwreSpec& s, Rng& r) : b(s.b), spec(s), rng(r) {
    create(s.root_color, -1, 0);
  }
  int create(int col, int par, int dep) {
    int idx = static_cast<int>(color.size());
    color.push_back(col);
    parent.push_back(par);
    depth.push_back(dep);
    std::size_t pk = p.size();
    p.resize(pk + static_cast<std::size_t>(b) + 1);
    sample_jump(spec, col, rng,
                std::span<double>(p.data() + pk, static_cast<std::size_t>(b) + 1));
    int perm[17];
    for (int k = 0; k < b; ++k) perm[k] = k + 1;
    for (int k = b - 1; k >= 1; --k) {
      int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
      std::swap(perm[k], perm[j]);
    }
    for (int k = 0; k < b; ++k) {
      children.push_back(-1);
      child_color.push_back(perm[k]);
    }
    return idx;
  }
  double prob(int v, int comp) const {
    return p[static_cast<std::size_t>(v) * (static_cast<std::size_t>(b) + 1) +
             static_cast<std::size_t>(comp)];
  }
  int child(int v, int k) {
    std::size_t idx = static_cast<std::size_t>(v) * static_cast<std::size_t>(b) +
                      static_cast<std::size_t>(k);
    // create() grows `children`, so never hold a reference across it
    if (children[idx] < 0) {
      int made = create(child_color[idx], v, depth[static_cast<std::size_t>(v)] + 1);
      children[idx] = made;
    }
    return children[idx];
  }
};

}  // namespace

WalkSummary simulate_walk(const RwreSpec& spec, long long steps,
                          std::uint64_t seed, int cut_depth) {
  if (steps < 0) throw InvalidArgument("simulate_walk: negative steps");
  if (cut_depth < 0) throw InvalidArgument("simulate_walk: negative cut_depth");
  Rng rng(seed);
  WalkArena arena(spec, rng);
  WalkSummary out;
  out.steps = steps;
  out.occupation_by_depth.assign(static_cast<std::size_t>(cut_depth) + 1, 0);
  int cur = 0;
  auto record = [&out, cut_depth](int dep) {
    if (dep <= cut_depth)
      ++out.occupation_by_depth[static_cast<std::size_t>(dep)];
    else
      ++out.beyond_cut;
  };
  out.root_visits = 1;
  record(0);
  for (long long t = 0; t < steps; ++t) {
    double r = rng.uniform01();
    int move = spec.b;  // fall through to the last child on rounding slack
    double acc = 0.0;
    for (int m = 0; m <= spec.b; ++m) {
      acc += arena.prob(cur, m);
      if (r < acc) {
        move = m;
        break;
      }
    }
    if (move == 0)
      cur = arena.parent[static_cast<std::size_t>(cur)] < 0
                ? 0
                : arena.parent[static_cast<std::size_t>(cur)];
    else
      cur = arena.child(cur, move - 1);
    int dep = arena.depth[static_cast<std::size_t>(cur)];
    if (cur == 0) ++out.root_visits;
    out.max_depth = std::max(out.max_depth, dep);
    record(dep);
  }
  out.final_depth = arena.depth[static_cast<std::size_t>(cur)];
  return out;
}

SweepResult hcr_sweep(const std::vector<double>& h_grid) {
  if (h_grid.empty()) throw InvalidArgument("hcr_sweep: empty grid");
  auto family = sweep_family("etawalk");
  SweepResult out;
  double lo = h_grid.front(), hi = h_grid.front();
  for (double h : h_grid) {
    if (!(h > 0.0) || !(h < 1.0))
      throw InvalidArgument("hcr_sweep: h must lie in (0,1)");
    out.rows.emplace_back(h, lambda1(family(h)).value);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  out.root = find_critical_parameter(family, lo, hi, CriticalTarget::Lambda1);
  return out;
}

}  // namespace coltree
