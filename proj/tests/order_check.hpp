#pragma once

#include <cmath>
#include <vector>

#include "homdelay/history.hpp"
#include "homdelay/integrator.hpp"
#include "homdelay/registry.hpp"

namespace homdelay::testing {

/// Step-halving study on example 1 (φ ≡ 0.5, h = 10) over [0, 100]: max
/// error at the coarsest grid's nodes against a fine reference run.
struct OrderStudy {
  std::vector<double> steps;
  std::vector<double> errors;
  std::vector<double> ratios;
};

inline OrderStudy RunOrderStudy() {
  const SystemModel ex1 = build_example({});
  const HistorySegment phi = HistorySegment::Constant(10.0, Vector::Constant(1, 0.5));
  const double horizon = 100.0;
  const double ref_step = 0.0078125;
  const Trajectory ref = integrate(ex1.rhs, phi, horizon, ref_step);
  OrderStudy study;
  study.steps = {0.5, 0.25, 0.125, 0.0625};
  const auto stride_of = [&](double s) {
    return static_cast<std::size_t>(std::llround(s / ref_step));
  };
  for (double s : study.steps) {
    const Trajectory traj = integrate(ex1.rhs, phi, horizon, s);
    const std::size_t coarse = static_cast<std::size_t>(std::llround(0.5 / s));
    double err = 0.0;
    for (std::size_t k = 0; k < traj.size(); k += coarse) {
      err = std::max(err, std::abs(traj.state(k)[0] -
                                   ref.state(k * stride_of(s))[0]));
    }
    study.errors.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < study.errors.size(); ++i) {
    study.ratios.push_back(study.errors[i] / study.errors[i + 1]);
  }
  return study;
}

}  // namespace homdelay::testing
