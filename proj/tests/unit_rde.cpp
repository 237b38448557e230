#include <cmath>
#include <numeric>

#include "doctest.h"
#include "env.hpp"
#include "errors.hpp"
#include "rde.hpp"
#include "stats.hpp"

using namespace coltree;

namespace {

EnvSpec pm_env(double c) { return builtin_env("pointmass,b=2,c=" + std::to_string(c)); }

}  // namespace

TEST_CASE("constant labels collapse the pools onto the affine fixed point") {
  // every pool member follows the same deterministic recursion
  // y_{k+1} = 1 + 2c y_k, whose limit is 1/(1 - 2c)
  RdeTrace tr = rde_iterate(pm_env(0.3), 100, 200, 1);
  CHECK_FALSE(tr.diverged);
  CHECK(tr.rows.size() == 400);
  for (int comp = 0; comp < 2; ++comp) {
    const RdeIterRow& last = tr.rows[tr.rows.size() - 2 + static_cast<std::size_t>(comp)];
    CHECK(last.iteration == 200);
    CHECK(last.component == comp + 1);
    CHECK(last.mean == doctest::Approx(2.5).epsilon(1e-9));
    for (double v : tr.pools[static_cast<std::size_t>(comp)])
      CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
    // the reported mean is exactly the mean of the returned pool
    double total = 0.0;
    for (double v : tr.pools[static_cast<std::size_t>(comp)]) total += v;
    CHECK(last.mean == total / 100.0);
  }
  // pools have converged bitwise by iteration 200, so the last KS is 0;
  // the first is 1 because every sample moves strictly off the seed value
  CHECK(tr.rows.front().ks_to_previous == 1.0);
  CHECK(tr.rows.back().ks_to_previous == 0.0);
}

TEST_CASE("supercritical constant labels trip the divergence sentinel") {
  // partial sums of 1.6^k cross 1e15 at iteration 72
  RdeTrace tr = rde_iterate(pm_env(0.8), 500, 100, 3);
  CHECK(tr.diverged);
  CHECK(tr.diverged_iteration == 72);
  CHECK(tr.rows.back().iteration == tr.diverged_iteration);
  CHECK(tr.rows.size() == 2 * static_cast<std::size_t>(tr.diverged_iteration));
}

TEST_CASE("mean system solves (I - m(1)) x = e") {
  std::vector<double> sym = rde_mean_system(pm_env(0.3));
  REQUIRE(sym.size() == 2);
  CHECK(sym[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sym[1] == doctest::Approx(2.5).epsilon(1e-12));

  EnvSpec asym;
  asym.b = 2;
  asym.root_color = 1;
  asym.sibling_mode = SiblingMode::Independent;
  asym.entries = {DistSpec{PointMass{0.2}}, DistSpec{PointMass{0.3}},
                  DistSpec{PointMass{0.1}}, DistSpec{PointMass{0.5}}};
  std::vector<double> x = rde_mean_system(asym);
  CHECK(x[0] == doctest::Approx(80.0 / 37.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(90.0 / 37.0).epsilon(1e-12));

  EnvSpec sub = builtin_env("lognormal,b=2,mu=-2,sigma=0.5");
  std::vector<double> m = rde_mean_system(sub);
  double expected = 1.0 / (1.0 - 2.0 * std::exp(-1.875));
  CHECK(m[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mean system refuses environments without a finite mean") {
  CHECK_THROWS_WITH_AS(rde_mean_system(pm_env(0.5)),
                       doctest::Contains("no finite mean"), DomainError);
  CHECK_THROWS_AS(rde_mean_system(pm_env(0.8)), DomainError);
}

TEST_CASE("population dynamics tracks the exact mean vector") {
  EnvSpec env = builtin_env("lognormal,b=2,mu=-2,sigma=0.5");
  std::vector<double> exact = rde_mean_system(env);
  for (std::uint64_t seed : {1ull, 4ull}) {
    RdeTrace tr = rde_iterate(env, 20000, 25, seed);
    CHECK_FALSE(tr.diverged);
    for (int i = 0; i < 2; ++i) {
      RunningStats rs;
      for (double v : tr.pools[static_cast<std::size_t>(i)]) {
        CHECK(v > 1.0);  // affine map over strictly positive labels
        rs.add(v);
      }
      CHECK(std::abs(rs.mean - exact[static_cast<std::size_t>(i)]) <=
            3.0 * rs.std_err());
    }
    // pools start at the constant 1, so the first step moves everything
    CHECK(tr.rows.front().ks_to_previous == 1.0);
    CHECK(tr.rows.back().ks_to_previous < 0.05);
  }
}

TEST_CASE("pool evolution is deterministic in the seed") {
  EnvSpec env = builtin_env("lognormal,b=2,mu=-2,sigma=0.5");
  RdeTrace a = rde_iterate(env, 200, 10, 5);
  RdeTrace b = rde_iterate(env, 200, 10, 5);
  CHECK(a.pools == b.pools);
  RdeTrace c = rde_iterate(env, 200, 10, 6);
  CHECK(a.pools != c.pools);
}

TEST_CASE("fixed-point iteration rejects bad arguments") {
  CHECK_THROWS_AS(rde_iterate(builtin_env("etawalk,h=0.5"), 100, 10, 1),
                  InvalidArgument);  // joint sibling labels
  CHECK_THROWS_AS(rde_iterate(pm_env(0.3), 1, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(rde_iterate(pm_env(0.3), 100, 0, 1), InvalidArgument);
}

TEST_CASE("existence verdict follows the spectral phase") {
  CHECK((rde_existence(pm_env(0.3)) == RdeVerdict::SolutionExists));
  CHECK((rde_existence(pm_env(0.8)) == RdeVerdict::NoSolution));
  CHECK((rde_existence(pm_env(0.5)) == RdeVerdict::Critical));
}
