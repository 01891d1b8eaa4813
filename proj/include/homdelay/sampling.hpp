#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

#include "homdelay/errors.hpp"

namespace homdelay {

/// Quasi-random directions on the unit sphere S^{d-1}: Halton points in the
/// unit cube pushed through Box–Muller pairs and normalized. `offset` skips
/// the first points of the sequence so that independent sample sets can be
/// drawn for validation.
class SphereSampler {
 public:
  explicit SphereSampler(std::size_t dimension, std::size_t offset = 0)
      : dimension_(dimension), index_(offset + 1) {
    if (dimension_ == 0 || dimension_ > kPrimes.size()) {
      throw DimensionError("SphereSampler supports 1.." +
                           std::to_string(kPrimes.size()) + " dimensions");
    }
  }

  std::size_t dimension() const { return dimension_; }

  Eigen::VectorXd Next() {
    const std::size_t coords = dimension_ + (dimension_ % 2);
    Eigen::VectorXd gauss(coords);
    for (;;) {
      for (std::size_t k = 0; k < coords; k += 2) {
        // Halton radical inverses lie in (0, 1) for index >= 1.
        const double u1 = RadicalInverse(index_, kPrimes[k]);
        const double u2 = RadicalInverse(index_, kPrimes[k + 1]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        gauss[k] = r * std::cos(2.0 * std::numbers::pi * u2);
        gauss[k + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
      }
      ++index_;
      Eigen::VectorXd dir = gauss.head(dimension_);
      const double norm = dir.norm();
      if (norm > 1e-12) return dir / norm;
    }
  }

 private:
  static constexpr std::array<unsigned, 16> kPrimes = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

  static double RadicalInverse(std::size_t i, unsigned base) {
    double inv_base = 1.0 / base;
    double factor = inv_base;
    double result = 0.0;
    while (i > 0) {
      result += static_cast<double>(i % base) * factor;
      i /= base;
      factor *= inv_base;
    }
    return result;
  }

  std::size_t dimension_;
  std::size_t index_;
};

}  // namespace homdelay
