#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "homdelay/errors.hpp"

namespace homdelay {

/// Weights of the composite Simpson rule for `intervals` uniform intervals of
/// width `spacing`. An odd interval count closes with the 3/8 rule on the
/// last three intervals; one interval falls back to the trapezoid rule.
inline std::vector<double> SimpsonWeights(std::size_t intervals,
                                          double spacing) {
  if (intervals == 0) return {0.0};
  std::vector<double> w(intervals + 1, 0.0);
  if (intervals == 1) {
    w[0] = w[1] = 0.5 * spacing;
    return w;
  }
  const std::size_t simpson_end =
      intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += spacing / 3.0;
    w[i + 1] += 4.0 * spacing / 3.0;
    w[i + 2] += spacing / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3.0 * spacing / 8.0;
    w[i + 1] += 9.0 * spacing / 8.0;
    w[i + 2] += 9.0 * spacing / 8.0;
    w[i + 3] += 3.0 * spacing / 8.0;
  }
  return w;
}

/// ∫ over uniform samples (values.size() - 1 intervals).
inline double IntegrateUniform(std::span<const double> values,
                               double spacing) {
  if (values.empty()) throw Error("IntegrateUniform: no samples");
  const auto w = SimpsonWeights(values.size() - 1, spacing);
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += w[i] * values[i];
  return sum;
}

}  // namespace homdelay
