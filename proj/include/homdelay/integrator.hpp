#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homdelay/errors.hpp"
#include "homdelay/history.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

/// h/1000, capped at 0.01, adjusted so that the step divides h.
inline double default_step(double h) {
  if (h <= 0.0) return 0.01;
  const double intervals = std::max(1000.0, std::ceil(h / 0.01 - 1e-9));
  return h / intervals;
}

/// 10⁴·h, or 10⁴ for the delay-free case.
inline double default_horizon(double h) { return 1e4 * (h > 0.0 ? h : 1.0); }

enum class OutputMode {
  kAll,        ///< every grid node (needed for windows and functionals)
  kLogSpaced,  ///< logarithmically thinned nodes for long horizons
};

struct IntegrationOptions {
  OutputMode output = OutputMode::kAll;
  /// Output density for kLogSpaced.
  std::size_t points_per_decade = 100;
  double blowup_factor = 1e6;
  /// Called at every grid node t_i ≥ 0 with the node state, whatever the
  /// output mode.
  std::function<void(double t, ConstVectorRef x)> observer;
};

/// Numerical solution on [-h, T]: the generating history plus grid nodes
/// t_i = i·Δt ≥ 0 (all of them, or a thinned output subset).
class Trajectory {
 public:
  const HistorySegment& history() const { return *history_; }
  std::size_t dimension() const { return n_; }
  double step() const { return step_; }
  double delay() const { return history_->delay(); }
  double horizon() const { return horizon_; }
  bool full_storage() const { return full_; }

  /// Number of stored nodes (t ≥ 0).
  std::size_t size() const { return times_.size(); }
  double time(std::size_t k) const { return times_[k]; }
  std::size_t grid_index(std::size_t k) const { return indices_[k]; }
  const std::vector<double>& times() const { return times_; }

  Eigen::Map<const Vector> state(std::size_t k) const {
    return Eigen::Map<const Vector>(states_.data() + k * n_, n_);
  }
  Eigen::Map<const Vector> derivative(std::size_t k) const {
    return Eigen::Map<const Vector>(slopes_.data() + k * n_, n_);
  }
  double norm(std::size_t k) const { return state(k).norm(); }

  /// x(t) for t ∈ [-h, T]. Between grid nodes this is the cubic Hermite
  /// interpolant, which needs full storage.
  Vector Evaluate(double t) const {
    Vector out(n_);
    EvaluateInto(t, out);
    return out;
  }

  void EvaluateInto(double t, VectorRef out) const {
    if (t <= 0.0) {
      history_->EvaluateInto(std::max(t, -delay()), out);
      return;
    }
    if (t > horizon_ * (1 + 1e-12)) throw Error("time beyond trajectory end");
    if (!full_) {
      const auto it = std::lower_bound(times_.begin(), times_.end(),
                                       t - 1e-12 * std::max(1.0, t));
      if (it != times_.end() && std::abs(*it - t) <= 1e-12 * std::max(1.0, t)) {
        out = state(static_cast<std::size_t>(it - times_.begin()));
        return;
      }
      throw Error("dense evaluation needs a full-storage trajectory");
    }
    const double pos = std::min(t / step_, static_cast<double>(size() - 1));
    auto i = static_cast<std::size_t>(pos);
    if (i >= size() - 1) i = size() - 2;
    const double u = pos - static_cast<double>(i);
    hermite::Value(u, step_, state(i), derivative(i), state(i + 1),
                   derivative(i + 1), out);
  }

 private:
  friend Trajectory integrate(const HomogeneousRHS&, const HistorySegment&,
                              double, double, const IntegrationOptions&);

  std::shared_ptr<const HistorySegment> history_;
  std::size_t n_ = 0;
  double step_ = 0.0;
  double horizon_ = 0.0;
  bool full_ = true;
  std::vector<double> times_;
  std::vector<std::size_t> indices_;
  std::vector<double> states_;
  std::vector<double> slopes_;
};

namespace detail {

inline std::vector<std::size_t> OutputIndices(std::size_t last,
                                              std::size_t per_decade) {
  std::vector<std::size_t> idx{0, last};
  if (last > 0) {
    const double decades = std::log10(static_cast<double>(last));
    const auto count = static_cast<std::size_t>(
        std::ceil(decades * static_cast<double>(per_decade)));
    for (std::size_t k = 0; k <= count; ++k) {
      const double e = decades * static_cast<double>(k) /
                       static_cast<double>(std::max<std::size_t>(count, 1));
      idx.push_back(static_cast<std::size_t>(std::llround(std::pow(10.0, e))));
    }
    for (std::size_t k = 1; k < per_decade; ++k) {
      idx.push_back(last * k / per_decade);
    }
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  while (!idx.empty() && idx.back() > last) idx.pop_back();
  return idx;
}

}  // namespace detail

/// Classical RK4 by the method of steps. The step must divide h so that the
/// delayed argument at the start and end of each step is a stored grid node;
/// the half-step stage reads the delayed argument from the cubic Hermite
/// interpolant of the stored nodes (or of the history for t - h ≤ 0).
///
/// Only the last delay window is kept in memory during the run; output nodes
/// are copied out according to `options.output`. The horizon is rounded down
/// to a whole number of steps.
inline Trajectory integrate(const HomogeneousRHS& rhs,
                            const HistorySegment& history, double horizon,
                            double step,
                            const IntegrationOptions& options = {}) {
  const std::size_t n = rhs.dimension();
  const double h = rhs.delay();
  if (history.dimension() != n) {
    throw DimensionError("history dimension differs from the system");
  }
  if (std::abs(history.delay() - h) > 1e-12 * std::max(1.0, h)) {
    throw Error("history length differs from the system delay");
  }
  if (!(horizon >= 0.0)) throw Error("horizon must be nonnegative");
  if (!(step > 0.0)) throw Error("step must be positive");

  std::size_t lag = 0;  // D = h / step
  if (h > 0.0) {
    const double ratio = h / step;
    lag = static_cast<std::size_t>(std::llround(ratio));
    if (lag == 0 ||
        std::abs(static_cast<double>(lag) * step - h) >
            8 * std::numeric_limits<double>::epsilon() * h) {
      throw Error("step " + std::to_string(step) + " does not divide h=" +
                  std::to_string(h));
    }
  }
  const auto last = static_cast<std::size_t>(
      std::floor(horizon / step + 1e-9));

  Trajectory traj;
  traj.history_ = std::make_shared<const HistorySegment>(history);
  traj.n_ = n;
  traj.step_ = step;
  traj.horizon_ = static_cast<double>(last) * step;
  traj.full_ = options.output == OutputMode::kAll;

  std::vector<std::size_t> outputs;
  if (traj.full_) {
    const double bytes = 2.0 * 8.0 * static_cast<double>(n) *
                         static_cast<double>(last + 1);
    if (bytes > 4e9) {
      throw Error("full-storage trajectory would need " +
                  std::to_string(bytes / 1e9) +
                  " GB; use OutputMode::kLogSpaced");
    }
    traj.times_.reserve(last + 1);
    traj.indices_.reserve(last + 1);
    traj.states_.reserve((last + 1) * n);
    traj.slopes_.reserve((last + 1) * n);
  } else {
    outputs = detail::OutputIndices(last, std::max<std::size_t>(
                                              options.points_per_decade, 1));
  }
  std::size_t next_output = 0;

  const double limit = options.blowup_factor * (1.0 + history.sup_norm());

  // Ring buffer holding nodes i-D .. i (state and slope).
  const std::size_t capacity = lag + 2;
  std::vector<double> ring_x(capacity * n), ring_d(capacity * n);
  auto slot = [&](std::size_t i) { return (i % capacity) * n; };

  Vector x(n), y_a(n), y_m(n), y_b(n), stage(n);
  Vector k1(n), k2(n), k3(n), k4(n), d_next(n);

  // y(t_j·Δt) for a grid index j (may be ≤ 0).
  auto delayed_node = [&](std::ptrdiff_t j, VectorRef out) {
    if (j <= 0) {
      history.EvaluateInto(static_cast<double>(j) * step, out);
    } else {
      const std::size_t s = slot(static_cast<std::size_t>(j));
      for (std::size_t c = 0; c < n; ++c) out[c] = ring_x[s + c];
    }
  };
  // y at the midpoint of grid interval [j, j+1].
  auto delayed_mid = [&](std::ptrdiff_t j, VectorRef out) {
    if (j + 1 <= 0) {
      history.EvaluateInto((static_cast<double>(j) + 0.5) * step, out);
    } else {
      const std::size_t a = slot(static_cast<std::size_t>(j));
      const std::size_t b = slot(static_cast<std::size_t>(j + 1));
      for (std::size_t c = 0; c < n; ++c) {
        out[c] = 0.5 * (ring_x[a + c] + ring_x[b + c]) +
                 0.125 * step * (ring_d[a + c] - ring_d[b + c]);
      }
    }
  };

  auto record = [&](std::size_t i, const Vector& state, const Vector& slope) {
    const double t = static_cast<double>(i) * step;
    if (options.observer) options.observer(t, state);
    const bool keep = traj.full_ || (next_output < outputs.size() &&
                                     outputs[next_output] == i);
    if (!keep) return;
    if (!traj.full_) ++next_output;
    traj.times_.push_back(t);
    traj.indices_.push_back(i);
    traj.states_.insert(traj.states_.end(), state.data(), state.data() + n);
    traj.slopes_.insert(traj.slopes_.end(), slope.data(), slope.data() + n);
  };

  auto store = [&](std::size_t i, const Vector& state, const Vector& slope) {
    const std::size_t s = slot(i);
    for (std::size_t c = 0; c < n; ++c) {
      ring_x[s + c] = state[c];
      ring_d[s + c] = slope[c];
    }
  };

  // Node 0.
  history.EvaluateInto(0.0, x);
  if (lag == 0) {
    y_a = x;
  } else {
    delayed_node(-static_cast<std::ptrdiff_t>(lag), y_a);
  }
  rhs.EvaluateInto(x, y_a, k1);
  store(0, x, k1);
  record(0, x, k1);

  for (std::size_t i = 0; i < last; ++i) {
    const double half = 0.5 * step;
    if (lag == 0) {
      stage = x + half * k1;
      rhs.EvaluateInto(stage, stage, k2);
      stage = x + half * k2;
      rhs.EvaluateInto(stage, stage, k3);
      stage = x + step * k3;
      rhs.EvaluateInto(stage, stage, k4);
      x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rhs.EvaluateInto(x, x, d_next);
    } else {
      const auto j = static_cast<std::ptrdiff_t>(i) -
                     static_cast<std::ptrdiff_t>(lag);
      delayed_mid(j, y_m);
      delayed_node(j + 1, y_b);
      for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + half * k1[c];
      rhs.EvaluateInto(stage, y_m, k2);
      for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + half * k2[c];
      rhs.EvaluateInto(stage, y_m, k3);
      for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + step * k3[c];
      rhs.EvaluateInto(stage, y_b, k4);
      for (std::size_t c = 0; c < n; ++c) {
        x[c] += (step / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      }
      rhs.EvaluateInto(x, y_b, d_next);
    }
    const double norm = x.norm();
    if (!(norm <= limit)) {
      throw BlowUpError("solution norm exceeded the blow-up guard at t=" +
                            std::to_string(static_cast<double>(i + 1) * step),
                        static_cast<double>(i + 1) * step);
    }
    k1 = d_next;
    store(i + 1, x, k1);
    record(i + 1, x, k1);
  }
  return traj;
}

/// ‖x_t‖ₕ: max of ‖x(s)‖ over s ∈ [t-h, t], evaluated on grid nodes,
/// interval midpoints and the window ends. Needs a full-storage trajectory.
inline double sup_norm_window(const Trajectory& traj, double t) {
  const double h = traj.delay();
  if (!(t >= 0.0) || t > traj.horizon() * (1 + 1e-12)) {
    throw Error("sup_norm_window: t=" + std::to_string(t) +
                " outside [0, T]");
  }
  if (!traj.full_storage()) {
    throw Error("sup_norm_window needs a full-storage trajectory");
  }
  const double lo = t - h;
  double best = std::max(traj.Evaluate(lo).norm(), traj.Evaluate(t).norm());
  if (h == 0.0) return best;
  const HistorySegment& hist = traj.history();
  // History part of the window.
  if (lo < 0.0) {
    const double s = hist.spacing();
    for (std::size_t i = 0; i <= hist.intervals(); ++i) {
      const double th = hist.theta(i);
      if (th >= lo && th <= std::min(t, 0.0)) {
        best = std::max(best, hist.node(i).norm());
      }
      const double mid = th + 0.5 * s;
      if (i < hist.intervals() && mid >= lo && mid <= std::min(t, 0.0)) {
        best = std::max(best, hist.Evaluate(mid).norm());
      }
    }
  }
  // Solution part.
  const double step = traj.step();
  const auto first = static_cast<std::size_t>(std::ceil(std::max(lo, 0.0) / step - 1e-9));
  const auto end = static_cast<std::size_t>(std::floor(t / step + 1e-9));
  for (std::size_t i = first; i <= end && i < traj.size(); ++i) {
    best = std::max(best, traj.norm(i));
    const double mid = (static_cast<double>(i) + 0.5) * step;
    if (mid >= lo && mid <= t && i + 1 < traj.size()) {
      best = std::max(best, traj.Evaluate(mid).norm());
    }
  }
  return best;
}

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
};

/// V(x(t)) at every stored node.
inline TimeSeries lyapunov_trace(const Trajectory& traj,
                                 const LyapunovData& lyap) {
  TimeSeries out;
  out.t.reserve(traj.size());
  out.value.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.t.push_back(traj.time(k));
    out.value.push_back(lyap.Value(traj.state(k)));
  }
  return out;
}

}  // namespace homdelay
