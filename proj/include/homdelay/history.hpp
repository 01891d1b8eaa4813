#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homdelay/errors.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

namespace hermite {

/// Cubic Hermite value on an interval of width `s` at local coordinate
/// u ∈ [0, 1], from end values p0, p1 and end slopes m0, m1.
template <typename A, typename B, typename C, typename D, typename Out>
void Value(double u, double s, const A& p0, const B& m0, const C& p1,
           const D& m1, Out&& out) {
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  out = h00 * p0 + (h10 * s) * m0 + h01 * p1 + (h11 * s) * m1;
}

/// Time derivative of the same interpolant.
template <typename A, typename B, typename C, typename D, typename Out>
void Slope(double u, double s, const A& p0, const B& m0, const C& p1,
           const D& m1, Out&& out) {
  const double u2 = u * u;
  const double d00 = (6 * u2 - 6 * u) / s;
  const double d10 = 3 * u2 - 4 * u + 1;
  const double d01 = (-6 * u2 + 6 * u) / s;
  const double d11 = 3 * u2 - 2 * u;
  out = d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1;
}

}  // namespace hermite

/// Initial function φ on [-h, 0] stored on a uniform grid with node slopes;
/// dense values come from the cubic Hermite interpolant.
class HistorySegment {
 public:
  static constexpr std::size_t kMinIntervals = 4;

  /// φ(θ) ≡ value.
  static HistorySegment Constant(double h, const Vector& value,
                                 std::size_t intervals = 16) {
    Matrix nodes(value.size(), intervals + 1);
    nodes.colwise() = value;
    return HistorySegment(h, std::move(nodes),
                          Matrix::Zero(value.size(), intervals + 1));
  }

  /// φ and optionally φ' given as callables, sampled on `intervals` uniform
  /// intervals. Without φ' the slopes come from second-order differences.
  static HistorySegment FromFunction(
      double h, std::size_t intervals,
      const std::function<Vector(double)>& phi,
      const std::function<Vector(double)>& dphi = nullptr) {
    if (intervals < kMinIntervals) {
      throw Error("history grid needs at least 4 intervals");
    }
    const Vector first = phi(-h);
    Matrix nodes(first.size(), intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
      nodes.col(i) = phi(GridTime(h, intervals, i));
    }
    if (dphi) {
      Matrix slopes(first.size(), intervals + 1);
      for (std::size_t i = 0; i <= intervals; ++i) {
        slopes.col(i) = dphi(GridTime(h, intervals, i));
      }
      return HistorySegment(h, std::move(nodes), std::move(slopes));
    }
    Matrix slopes = DifferenceSlopes(nodes, h / intervals);
    return HistorySegment(h, std::move(nodes), std::move(slopes));
  }

  /// Samples on a uniform grid θ₀ = -h < ... < θ_N = 0.
  static HistorySegment FromSamples(const std::vector<double>& theta,
                                    const std::vector<Vector>& values) {
    if (theta.size() != values.size()) {
      throw ConfigError("history: theta and values lengths differ");
    }
    if (theta.size() < kMinIntervals + 1) {
      throw ConfigError("history: need at least 5 samples");
    }
    const double h = -theta.front();
    const std::size_t intervals = theta.size() - 1;
    if (std::abs(theta.back()) > 1e-12 * std::max(1.0, h) || !(h >= 0.0)) {
      throw ConfigError("history: theta must run from -h to 0");
    }
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double expected = GridTime(h, intervals, i);
      if (std::abs(theta[i] - expected) > 1e-9 * std::max(1.0, h)) {
        throw ConfigError("history: theta grid is not uniform");
      }
    }
    const auto n = values.front().size();
    Matrix nodes(n, intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
      if (values[i].size() != n) {
        throw DimensionError("history: inconsistent sample dimensions");
      }
      nodes.col(i) = values[i];
    }
    Matrix slopes = h > 0 ? DifferenceSlopes(nodes, h / intervals)
                          : Matrix::Zero(n, intervals + 1);
    return HistorySegment(h, std::move(nodes), std::move(slopes));
  }

  double delay() const { return h_; }
  std::size_t intervals() const { return static_cast<std::size_t>(nodes_.cols()) - 1; }
  double spacing() const { return spacing_; }
  std::size_t dimension() const { return static_cast<std::size_t>(nodes_.rows()); }
  double theta(std::size_t i) const { return GridTime(h_, intervals(), i); }
  Eigen::Ref<const Vector> node(std::size_t i) const { return nodes_.col(i); }
  Eigen::Ref<const Vector> slope(std::size_t i) const { return slopes_.col(i); }
  /// Node values, one column per grid point.
  const Matrix& nodes() const { return nodes_; }

  /// ‖φ‖ₕ, the max of ‖φ‖ over grid nodes and interval midpoints.
  double sup_norm() const { return sup_norm_; }

  void EvaluateInto(double theta, VectorRef out) const {
    if (h_ == 0.0) {
      out = nodes_.col(intervals());
      return;
    }
    const auto [i, u] = Locate(theta);
    hermite::Value(u, spacing_, nodes_.col(i), slopes_.col(i),
                   nodes_.col(i + 1), slopes_.col(i + 1), out);
  }

  Vector Evaluate(double theta) const {
    Vector out(dimension());
    EvaluateInto(theta, out);
    return out;
  }

  Vector EvaluateSlope(double theta) const {
    Vector out(dimension());
    if (h_ == 0.0) return Vector::Zero(dimension());
    const auto [i, u] = Locate(theta);
    hermite::Slope(u, spacing_, nodes_.col(i), slopes_.col(i),
                   nodes_.col(i + 1), slopes_.col(i + 1), out);
    return out;
  }

 private:
  HistorySegment(double h, Matrix nodes, Matrix slopes)
      : h_(h), nodes_(std::move(nodes)), slopes_(std::move(slopes)) {
    if (!(h_ >= 0.0)) throw ConfigError("history: delay must be nonnegative");
    if (nodes_.rows() == 0) throw DimensionError("history: empty state");
    if (intervals() < kMinIntervals) {
      throw ConfigError("history grid needs at least 4 intervals");
    }
    spacing_ = h_ / static_cast<double>(intervals());
    sup_norm_ = 0.0;
    for (std::size_t i = 0; i <= intervals(); ++i) {
      sup_norm_ = std::max(sup_norm_, nodes_.col(i).norm());
      if (i < intervals() && h_ > 0.0) {
        Vector mid(dimension());
        hermite::Value(0.5, spacing_, nodes_.col(i), slopes_.col(i),
                       nodes_.col(i + 1), slopes_.col(i + 1), mid);
        sup_norm_ = std::max(sup_norm_, mid.norm());
      }
    }
  }

  static double GridTime(double h, std::size_t intervals, std::size_t i) {
    return i == intervals
               ? 0.0
               : -h + h * static_cast<double>(i) / static_cast<double>(intervals);
  }

  std::pair<std::size_t, double> Locate(double theta) const {
    const double pos = std::clamp((theta + h_) / spacing_, 0.0,
                                  static_cast<double>(intervals()));
    auto i = static_cast<std::size_t>(pos);
    if (i >= intervals()) i = intervals() - 1;
    return {i, pos - static_cast<double>(i)};
  }

  static Matrix DifferenceSlopes(const Matrix& nodes, double s) {
    const auto last = nodes.cols() - 1;
    Matrix slopes(nodes.rows(), nodes.cols());
    slopes.col(0) = (-3 * nodes.col(0) + 4 * nodes.col(1) - nodes.col(2)) / (2 * s);
    slopes.col(last) =
        (3 * nodes.col(last) - 4 * nodes.col(last - 1) + nodes.col(last - 2)) /
        (2 * s);
    for (Eigen::Index i = 1; i < last; ++i) {
      slopes.col(i) = (nodes.col(i + 1) - nodes.col(i - 1)) / (2 * s);
    }
    return slopes;
  }

  double h_;
  double spacing_ = 0.0;
  Matrix nodes_;
  Matrix slopes_;
  double sup_norm_ = 0.0;
};

}  // namespace homdelay
