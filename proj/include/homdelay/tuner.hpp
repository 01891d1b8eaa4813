#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "homdelay/errors.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/model.hpp"
#include "homdelay/razumikhin.hpp"

namespace homdelay {

enum class TuningTarget { kMaximizeDelta, kMinimizeC1, kMaximizeC2 };
enum class TuningMethod { kRazumikhin, kKrasovskiiGeneral, kKrasovskiiScalar };

inline std::string ToString(TuningTarget t) {
  switch (t) {
    case TuningTarget::kMinimizeC1: return "minimize-c1";
    case TuningTarget::kMaximizeC2: return "maximize-c2";
    default: return "maximize-delta";
  }
}

inline std::string ToString(TuningMethod m) {
  switch (m) {
    case TuningMethod::kRazumikhin: return "razumikhin";
    case TuningMethod::kKrasovskiiScalar: return "krasovskii-scalar";
    default: return "krasovskii-general";
  }
}

inline TuningTarget ParseTuningTarget(const std::string& s) {
  if (s == "maximize-delta") return TuningTarget::kMaximizeDelta;
  if (s == "minimize-c1") return TuningTarget::kMinimizeC1;
  if (s == "maximize-c2") return TuningTarget::kMaximizeC2;
  throw ConfigError("unknown tuning target '" + s + "'");
}

inline TuningMethod ParseTuningMethod(const std::string& s) {
  if (s == "razumikhin") return TuningMethod::kRazumikhin;
  if (s == "krasovskii-general") return TuningMethod::kKrasovskiiGeneral;
  if (s == "krasovskii-scalar") return TuningMethod::kKrasovskiiScalar;
  throw ConfigError("unknown tuning method '" + s + "'");
}

/// Box bound for one named parameter. Razumikhin accepts delta,
/// delta_scale, alpha, rho_margin; Krasovskii accepts chi, w1, w2, delta,
/// delta_scale.
struct ParamBound {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct TuningProblem {
  TuningTarget target = TuningTarget::kMaximizeDelta;
  TuningMethod method = TuningMethod::kKrasovskiiScalar;
  std::vector<ParamBound> bounds;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  /// Worker threads for the grid scan (0: hardware concurrency).
  std::size_t threads = 0;
};

using AnyCertificate = std::variant<RazumikhinCertificate, KrasovskiiCertificate>;

namespace detail {

inline void CheckNames(const TuningProblem& problem) {
  static const std::vector<std::string> lr = {"delta", "delta_scale", "alpha",
                                              "rho_margin"};
  static const std::vector<std::string> lk = {"chi", "w1", "w2", "delta",
                                              "delta_scale"};
  const auto& allowed = problem.method == TuningMethod::kRazumikhin ? lr : lk;
  for (const auto& b : problem.bounds) {
    if (std::find(allowed.begin(), allowed.end(), b.name) == allowed.end()) {
      throw ConfigError("parameter '" + b.name + "' is not tunable for " +
                        ToString(problem.method));
    }
    if (!(b.lo <= b.hi)) {
      throw ConfigError("empty bound for '" + b.name + "'");
    }
  }
}

inline AnyCertificate BuildCandidate(const SystemModel& model,
                                     const TuningProblem& problem,
                                     const std::vector<double>& x) {
  if (problem.method == TuningMethod::kRazumikhin) {
    RazumikhinParams p;
    double scale = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& name = problem.bounds[i].name;
      if (name == "delta") p.delta = x[i];
      if (name == "delta_scale") scale = x[i];
      if (name == "alpha") p.alpha = x[i];
      if (name == "rho_margin") p.rho_margin = x[i];
    }
    if (!p.delta && scale > 0.0) {
      const K4H kh = compute_k4_H(model.lyapunov.constants(), model.growth,
                                  model.rhs.delay(), model.rhs.mu(), p.alpha);
      p.delta = scale * kh.H;
    }
    return razumikhin_certificate(model, p);
  }
  KrasovskiiParams p;
  p.path = problem.method == TuningMethod::kKrasovskiiScalar
               ? KrasovskiiPath::kScalar
               : KrasovskiiPath::kGeneral;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& name = problem.bounds[i].name;
    if (name == "chi") p.chi = x[i];
    if (name == "w1") p.w1 = x[i];
    if (name == "w2") p.w2 = x[i];
    if (name == "delta") p.delta = x[i];
    if (name == "delta_scale") p.delta_scale = x[i];
  }
  return krasovskii_certificate(model, p);
}

inline double Score(TuningTarget target, const AnyCertificate& cert) {
  double delta = 0.0, c1 = 0.0, c2 = 0.0;
  if (const auto* lr = std::get_if<RazumikhinCertificate>(&cert)) {
    delta = lr->Delta;
    c1 = lr->c_tilde_1;
    c2 = lr->c_tilde_2;
  } else {
    const auto& lk = std::get<KrasovskiiCertificate>(cert);
    delta = lk.Delta;
    c1 = lk.c_hat_1;
    c2 = lk.c_hat_2;
  }
  switch (target) {
    case TuningTarget::kMinimizeC1: return -c1;
    case TuningTarget::kMaximizeC2: return c2;
    default: return delta;
  }
}

}  // namespace detail

/// Score of one parameter vector (larger is better; c̃₁/ĉ₁ minimization is
/// scored as -c₁), or nullopt when the certificate is infeasible.
inline std::optional<double> evaluate_candidate(const SystemModel& model,
                                                const TuningProblem& problem,
                                                const std::vector<double>& x) {
  if (x.size() != problem.bounds.size()) {
    throw DimensionError("candidate has " + std::to_string(x.size()) +
                         " parameters, problem has " +
                         std::to_string(problem.bounds.size()));
  }
  try {
    const double s = detail::Score(problem.target,
                                   detail::BuildCandidate(model, problem, x));
    if (!std::isfinite(s)) return std::nullopt;
    return s;
  } catch (const CertificateError&) {
    return std::nullopt;
  }
}

struct TuningResult {
  std::vector<std::string> names;
  std::vector<double> params;
  double score = 0.0;
  double grid_score = 0.0;
  std::size_t evaluations = 0;
  AnyCertificate certificate;
};

/// Grid scan followed by bounded Nelder–Mead from the best grid point.
/// Deterministic for a fixed problem and seed.
inline TuningResult tune(const SystemModel& model,
                         const TuningProblem& problem) {
  detail::CheckNames(problem);
  if (problem.budget < 1) throw ConfigError("tuning budget must be ≥ 1");
  const std::size_t d = problem.bounds.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  auto score_of = [&](const std::vector<double>& x) {
    return evaluate_candidate(model, problem, x).value_or(neg_inf);
  };

  // Grid phase: at most half of the budget, at most 10 points per axis.
  std::size_t per_axis = 10;
  if (d > 0) {
    const double cap =
        std::floor(std::pow(static_cast<double>(problem.budget) / 2.0,
                            1.0 / static_cast<double>(d)) + 1e-9);
    per_axis = static_cast<std::size_t>(std::clamp(cap, 2.0, 10.0));
  }
  std::vector<std::size_t> counts(d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    counts[i] = problem.bounds[i].lo == problem.bounds[i].hi ? 1 : per_axis;
    total *= counts[i];
  }
  total = std::min(total, problem.budget);
  auto grid_point = [&](std::size_t index) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t k = index % counts[i];
      index /= counts[i];
      const auto& b = problem.bounds[i];
      x[i] = counts[i] == 1 ? b.lo
                            : b.lo + (b.hi - b.lo) * static_cast<double>(k) /
                                         static_cast<double>(counts[i] - 1);
    }
    return x;
  };
  std::vector<double> scores(total, neg_inf);
  std::size_t workers = problem.threads != 0
                            ? problem.threads
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(total / 64, 1));
  {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < total; i += workers) {
          scores[i] = score_of(grid_point(i));
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  std::size_t evaluations = total;
  const auto best_it = std::max_element(scores.begin(), scores.end());
  std::vector<double> best = grid_point(
      static_cast<std::size_t>(best_it - scores.begin()));
  double best_score = *best_it;
  const double grid_score = best_score;

  // Simplex phase.
  auto clamp_box = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = std::clamp(x[i], problem.bounds[i].lo, problem.bounds[i].hi);
    }
  };
  std::mt19937_64 rng(problem.seed);
  std::vector<std::size_t> free_axes;
  for (std::size_t i = 0; i < d; ++i) {
    if (problem.bounds[i].lo < problem.bounds[i].hi) free_axes.push_back(i);
  }
  double step_fraction = 0.1;
  while (!free_axes.empty() && evaluations + free_axes.size() + 1 <=
                                   problem.budget &&
         std::isfinite(best_score)) {
    const std::size_t k = free_axes.size();
    // Seeded axis order and signs for the initial simplex.
    std::vector<std::size_t> order = free_axes;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<double>> simplex{best};
    std::vector<double> values{best_score};
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> x = best;
      const auto& b = problem.bounds[order[j]];
      const double sign = (rng() & 1u) ? 1.0 : -1.0;
      double delta = sign * step_fraction * (b.hi - b.lo);
      if (x[order[j]] + delta > b.hi || x[order[j]] + delta < b.lo) {
        delta = -delta;
      }
      x[order[j]] += delta;
      clamp_box(x);
      simplex.push_back(x);
      values.push_back(score_of(x));
      ++evaluations;
    }
    const double start_best = best_score;
    // Nelder–Mead on -score.
    for (;;) {
      std::vector<std::size_t> idx(k + 1);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> v2;
      for (auto i : idx) {
        s2.push_back(simplex[i]);
        v2.push_back(values[i]);
      }
      simplex.swap(s2);
      values.swap(v2);
      if (values[0] > best_score) {
        best_score = values[0];
        best = simplex[0];
      }
      double spread = 0.0;
      for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t i : free_axes) {
          const auto& b = problem.bounds[i];
          spread = std::max(spread,
                            std::abs(simplex[j][i] - simplex[0][i]) / (b.hi - b.lo));
        }
      }
      if (spread < 1e-10 || evaluations + 2 > problem.budget) break;

      std::vector<double> centroid(d, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[j][i] / static_cast<double>(k);
      }
      auto along = [&](double t) {
        std::vector<double> x(d);
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = centroid[i] + t * (simplex[k][i] - centroid[i]);
        }
        clamp_box(x);
        return x;
      };
      const auto xr = along(-1.0);
      const double fr = score_of(xr);
      ++evaluations;
      if (fr > values[0]) {
        const auto xe = along(-2.0);
        const double fe = score_of(xe);
        ++evaluations;
        if (fe > fr) {
          simplex[k] = xe;
          values[k] = fe;
        } else {
          simplex[k] = xr;
          values[k] = fr;
        }
        continue;
      }
      if (fr > values[k - 1]) {
        simplex[k] = xr;
        values[k] = fr;
        continue;
      }
      const bool outside = fr > values[k];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = score_of(xc);
      ++evaluations;
      if (fc > std::max(fr, values[k]) || (fc > values[k] && !outside)) {
        simplex[k] = xc;
        values[k] = fc;
        continue;
      }
      // Shrink toward the best vertex.
      if (evaluations + k > problem.budget) break;
      for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
          simplex[j][i] = simplex[0][i] + 0.5 * (simplex[j][i] - simplex[0][i]);
        }
        values[j] = score_of(simplex[j]);
        ++evaluations;
      }
    }
    // Restart with a smaller simplex until restarts stop helping.
    if (!(best_score > start_best)) step_fraction *= 0.5;
    if (step_fraction < 1e-6) break;
  }

  if (!std::isfinite(best_score)) {
    throw CertificateError("no feasible candidate within the tuning budget");
  }
  TuningResult result;
  for (const auto& b : problem.bounds) result.names.push_back(b.name);
  result.params = best;
  result.score = best_score;
  result.grid_score = grid_score;
  result.evaluations = evaluations;
  result.certificate = detail::BuildCandidate(model, problem, best);
  return result;
}

/// Default search box for a method on the given model.
inline std::vector<ParamBound> default_bounds(const SystemModel& model,
                                              TuningMethod method) {
  const double h = model.rhs.delay();
  const double hh = std::max(h, 1e-12);
  if (method == TuningMethod::kRazumikhin) {
    return {{"delta_scale", 0.01, 1.0 - 1e-6}, {"alpha", 1.05, 10.0}};
  }
  if (method == TuningMethod::kKrasovskiiScalar) {
    const ScalarForm form = scalar_form(model.rhs);
    const double w = -2.0 * (form.alpha1 + form.alpha2);
    const double a2 = std::abs(form.alpha2);
    const double chi_max = h > 0.0 && a2 > 0.0 ? std::sqrt(1.0 / (h * a2)) : 10.0;
    return {{"chi", 1e-3 * chi_max, (1.0 - 1e-3) * chi_max},
            {"w1", 1e-4 * w, (1.0 - 1e-4) * w},
            {"w2", 1e-4 * w / hh, (1.0 - 1e-4) * w / hh},
            {"delta_scale", 0.01, 1.0 - 1e-6}};
  }
  const auto& lc = model.lyapunov.constants();
  const double chi_max = std::pow(lc.w / (lc.k2 * model.growth.m),
                                  1.0 / (2.0 * (lc.gamma - 1.0)));
  return {{"chi", 1e-3 * chi_max, chi_max},
          {"w1", 1e-4 * lc.w, (1.0 - 1e-4) * lc.w},
          {"w2", 1e-4 * lc.w / hh, (1.0 - 1e-4) * lc.w / hh},
          {"delta_scale", 0.01, 1.0 - 1e-6}};
}

}  // namespace homdelay
