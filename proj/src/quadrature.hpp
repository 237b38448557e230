#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace coltree {

// Adaptive Simpson on [a,b]: relative tolerance 1e-10 by default, at most
// 2^16 interval subdivisions, error on non-convergence.
namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(F&& f, double a, double fa, double m, double fm, double b,
             double fb, double whole, double tol, std::int64_t& splits,
             std::int64_t max_splits) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * (std::abs(a) + 1.0))
    return left + right + delta / 15.0;
  if (++splits > max_splits)
    throw ConvergenceError("adaptive quadrature: subdivision cap exceeded");
  return adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, splits, max_splits) +
         adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, splits, max_splits);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-10,
                        std::int64_t max_splits = 1 << 16) {
  if (!(a < b)) throw InvalidArgument("adaptive_simpson: empty interval");
  double fa = f(a);
  double fb = f(b);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = detail::simpson(a, fa, b, fb, fm);
  // Two refinement passes to seed a sane absolute tolerance from the scale.
  double scale = std::abs(whole);
  if (scale == 0.0) scale = std::abs(b - a) * (std::abs(fm) + 1e-300);
  double tol = rel_tol * (scale + 1e-300);
  std::int64_t splits = 0;
  double r =
      detail::adapt(f, a, fa, m, fm, b, fb, whole, tol, splits, max_splits);
  if (!std::isfinite(r))
    throw ConvergenceError("adaptive quadrature: non-finite result");
  return r;
}

}  // namespace coltree
