// root_finding.hpp
// Bracketed scalar root finding: Illinois-modified regula falsi with a
// bisection safeguard. The bracket is maintained on signs alone, so the
// function may return values rescaled by any positive, point-dependent factor.

#pragma once

#include <cmath>
#include <stdexcept>

namespace maxent {

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <class F>
RootResult find_root_bracketed(F&& func, double lo, double hi, double tol, int max_iter = 500) {
  double flo = func(lo);
  double fhi = func(hi);
  RootResult result;
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if (std::isnan(flo) || std::isnan(fhi) || (flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("find_root_bracketed: endpoints do not bracket a root");
  }

  // side: which end was retained on the last step (-1 lo, +1 hi).
  int side = 0;
  double prev_width = hi - lo;
  bool force_bisect = false;
  for (int it = 1; it <= max_iter; ++it) {
    result.iterations = it;
    double x;
    if (force_bisect || !std::isfinite(flo) || !std::isfinite(fhi)) {
      x = 0.5 * (lo + hi);
    } else {
      x = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    }
    // Bracket is down to adjacent doubles.
    if (!(x > lo && x < hi)) return {x, it, true};
    const double fx = func(x);
    if (fx == 0.0) return {x, it, true};
    if (std::isnan(fx)) {
      throw std::runtime_error("find_root_bracketed: function returned NaN");
    }
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    const double width = hi - lo;
    if (width <= tol) return {0.5 * (lo + hi), it, true};
    force_bisect = width > 0.5 * prev_width;
    prev_width = width;
  }
  result.root = 0.5 * (lo + hi);
  return result;
}

}  // namespace maxent
