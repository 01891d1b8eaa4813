#pragma once

#include <cmath>
#include <functional>

#include "homdelay/errors.hpp"

namespace homdelay {

/// Root of g(x) = target for g strictly increasing on [lo, hi] with
/// g(lo) ≤ target ≤ g(hi). Bisects until the bracket cannot shrink further in
/// double precision, which is well inside a 1e-12 relative tolerance.
inline double BisectIncreasing(const std::function<double(double)>& g,
                               double target, double lo, double hi) {
  if (!(lo <= hi)) throw Error("BisectIncreasing: empty bracket");
  if (g(lo) > target || g(hi) < target) {
    throw Error("BisectIncreasing: target not bracketed");
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick the endpoint with the smaller residual.
  return std::abs(g(lo) - target) <= std::abs(g(hi) - target) ? lo : hi;
}

}  // namespace homdelay
