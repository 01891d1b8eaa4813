#pragma once

#include <cmath>

#include "homdelay/errors.hpp"

namespace homdelay {

/// t ↦ c₁‖φ‖ₕ(1 + c₂‖φ‖ₕ^{μ-1} t)^{-1/(μ-1)}.
struct EstimateCurve {
  double c1 = 0.0;
  double c2 = 0.0;
  double mu = 2.0;

  double operator()(double phi_norm, double t) const {
    if (phi_norm == 0.0) return 0.0;
    const double e = mu - 1.0;
    return c1 * phi_norm *
           std::pow(1.0 + c2 * std::pow(phi_norm, e) * t, -1.0 / e);
  }
};

}  // namespace homdelay
