#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "homdelay/homdelay.hpp"

namespace homdelay::testing {

struct SuiteResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Largest (lhs - rhs)/|rhs| seen; negative when every check had room.
  double worst = -std::numeric_limits<double>::infinity();

  void Record(double lhs, double rhs, double rel_slack, double abs_slack = 0.0) {
    ++checked;
    const double scale = std::max(std::abs(rhs), 1e-300);
    worst = std::max(worst, (lhs - rhs) / scale);
    if (lhs > rhs + rel_slack * std::abs(rhs) + abs_slack) ++violations;
  }
  void Merge(const SuiteResult& o) {
    checked += o.checked;
    violations += o.violations;
    worst = std::max(worst, o.worst);
  }
  bool ok() const { return checked > 0 && violations == 0; }
};

/// Random continuous history on [-h, 0] with ‖φ‖ₕ = radius·u, u ∈ (0.05, 1).
/// Mixes smooth trigonometric shapes with rough piecewise-linear ones.
inline HistorySegment RandomHistory(std::mt19937_64& rng, std::size_t n,
                                    double h, double radius,
                                    std::size_t intervals = 200) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(0.0, 6.0);
  std::bernoulli_distribution rough(0.3);
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<double> theta(intervals + 1);
  std::vector<Vector> values(intervals + 1, Vector(n));
  for (std::size_t i = 0; i <= intervals; ++i) {
    theta[i] = i == intervals ? 0.0
                              : -h + h * static_cast<double>(i) /
                                         static_cast<double>(intervals);
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (rough(rng)) {
      double v = uni(rng);
      for (std::size_t i = 0; i <= intervals; ++i) {
        v = std::clamp(v + 0.3 * uni(rng), -1.0, 1.0);
        values[i][static_cast<Eigen::Index>(c)] = v;
      }
    } else {
      const double a0 = uni(rng);
      double a[3], f[3], ph[3];
      for (int k = 0; k < 3; ++k) {
        a[k] = uni(rng);
        f[k] = freq(rng);
        ph[k] = two_pi * uni(rng);
      }
      for (std::size_t i = 0; i <= intervals; ++i) {
        const double s = h > 0.0 ? theta[i] / h : 0.0;
        double v = a0;
        for (int k = 0; k < 3; ++k) v += a[k] * std::sin(two_pi * f[k] * s + ph[k]);
        values[i][static_cast<Eigen::Index>(c)] = v;
      }
    }
  }
  const HistorySegment raw = HistorySegment::FromSamples(theta, values);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  const double scale = radius * frac(rng) / std::max(raw.sup_norm(), 1e-300);
  for (auto& v : values) v *= scale;
  return HistorySegment::FromSamples(theta, values);
}

/// (|x₀|^q + ∫|x|^q)^{p/q} ≤ L₁(|x₀|^p + ∫|x|^p) on scalar histories.
inline double MixingLhs(const SegmentNodes& s, double q, double p) {
  const double x0 = s.nodes.col(s.nodes.cols() - 1).norm();
  const double iq =
      s.Integrate([&](double, const auto& phi) { return std::pow(phi.norm(), q); });
  return std::pow(std::pow(x0, q) + iq, p / q);
}
inline double MixingRhs(const SegmentNodes& s, double p, double L1) {
  const double x0 = s.nodes.col(s.nodes.cols() - 1).norm();
  const double ip =
      s.Integrate([&](double, const auto& phi) { return std::pow(phi.norm(), p); });
  return L1 * (std::pow(x0, p) + ip);
}

/// Both norm-mixing inequalities on `count` random histories each, with
/// random (p, q, h) for the first and k ∈ {2, 3, 4} for the second.
inline SuiteResult RunMixingInequalities(std::size_t count, std::uint64_t seed,
                                         double rel_slack = 1e-8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hdist(0.05, 20.0);
  std::uniform_real_distribution<double> qdist(1.0, 4.0);
  std::uniform_real_distribution<double> gap(0.01, 4.0);
  std::uniform_real_distribution<double> amp(0.01, 3.0);
  SuiteResult r;
  for (std::size_t i = 0; i < count; ++i) {
    const double h = hdist(rng);
    const double q = qdist(rng);
    const double p = q + gap(rng);
    const auto s = SegmentNodes::Of(RandomHistory(rng, 1, h, amp(rng), 2000));
    r.Record(MixingLhs(s, q, p), MixingRhs(s, p, mixing_constant_general(p, q, h)), rel_slack);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double h = hdist(rng);
    const double k = 2.0 + static_cast<double>(i % 3);
    const auto s = SegmentNodes::Of(RandomHistory(rng, 1, h, amp(rng), 2000));
    r.Record(MixingLhs(s, 2.0, 2.0 * k),
             MixingRhs(s, 2.0 * k, mixing_constant_scalar(k, h)), rel_slack);
  }
  return r;
}

struct NamedCase {
  std::string name;
  SystemModel model;
  KrasovskiiCertificate lk;
  RazumikhinCertificate lr;
};

/// The table presets with both certificates.
inline std::vector<NamedCase> PresetCases() {
  std::vector<NamedCase> out;
  for (const char* name : {"table1", "table2", "table3"}) {
    const Preset p = preset(name);
    SystemModel model = build_example(p.example);
    KrasovskiiCertificate lk = krasovskii_certificate(model, p.krasovskii);
    RazumikhinCertificate lr = razumikhin_certificate(model, p.razumikhin);
    out.push_back({name, std::move(model), lk, lr});
  }
  return out;
}

/// a₁|φ(0)|^γ + a₂∫‖φ‖^p ≤ v(φ) ≤ min{b(…), k₁‖φ(0)‖^γ + β‖φ‖ₕ^p} on
/// `count` random histories inside the δ-ball of each preset certificate.
inline SuiteResult RunSandwich(std::size_t count, std::uint64_t seed,
                               double rel_slack = 1e-8) {
  std::mt19937_64 rng(seed);
  SuiteResult r;
  const auto cases = PresetCases();
  for (std::size_t i = 0; i < count; ++i) {
    const NamedCase& c = cases[i % cases.size()];
    const auto s = SegmentNodes::Of(RandomHistory(
        rng, c.model.rhs.dimension(), c.lk.h, c.lk.delta, 400));
    const double v = functional_value(s, c.lk, c.model);
    const SandwichBounds b = sandwich_bounds(s, c.lk);
    r.Record(b.lower, v, rel_slack);
    r.Record(v, b.upper_b, rel_slack);
    r.Record(v, b.upper_beta, rel_slack);
  }
  return r;
}

struct TrajectorySuite {
  SuiteResult decay;       // dv/dt ≤ -L₂v^{p/γ}
  SuiteResult derivative;  // dv/dt ≤ -c(‖x‖^p + ∫‖x‖^p)
  SuiteResult comparison;  // V(x(t)) ≤ z(t), t ≥ h
  SuiteResult envelopes;   // ‖x(t)‖ ≤ both envelopes
  std::size_t trajectories = 0;
};

/// Random histories with ‖φ‖ₕ < min{Δ_LR, Δ_LK}, alternating between the
/// example 1 estimate preset and the example 2 preset, simulated over
/// `delays` delay intervals.
inline TrajectorySuite RunTrajectories(std::size_t count, std::uint64_t seed,
                                       double delays = 20.0) {
  std::mt19937_64 rng(seed);
  TrajectorySuite out;
  const auto all = PresetCases();
  const NamedCase* cases[] = {&all[1], &all[2]};
  for (std::size_t i = 0; i < count; ++i) {
    const NamedCase& c = *cases[i % 2];
    const double h = c.model.rhs.delay();
    const double radius = std::min(c.lk.Delta, c.lr.Delta) * (1.0 - 1e-9);
    const HistorySegment phi =
        RandomHistory(rng, c.model.rhs.dimension(), h, radius, 100);
    const double step = h / 1000.0;
    const Trajectory traj = integrate(c.model.rhs, phi, delays * h, step);

    TraceOptions opt;
    opt.stride = 7;
    // Finite-difference noise: a relative part and a floor set by the
    // rounding of v itself.
    opt.slack_rel = 1e-6;
    const double v0 = functional_value(phi, c.lk, c.model);
    opt.slack_abs = 1e-12 * v0 / step;
    for (const auto& s : functional_derivative_trace(traj, c.lk, c.model, opt)) {
      out.decay.Record(s.dvdt, s.decay_bound, 1e-6, opt.slack_abs);
      out.derivative.Record(s.dvdt, s.derivative_bound, 1e-6, opt.slack_abs);
    }

    const double norm = phi.sup_norm();
    const double z0 = c.lr.k1 *
                      std::pow(short_time_bound(norm, c.lr.m, h, c.lr.mu, c.lr.K),
                               c.lr.gamma);
    const EstimateCurve lr_curve = c.lr.curve();
    const EstimateCurve lk_curve = c.lk.curve();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.time(k);
      const double x = traj.norm(k);
      out.envelopes.Record(x, lr_curve(norm, t), 1e-12);
      out.envelopes.Record(x, lk_curve(norm, t), 1e-12);
      if (t >= h) {
        out.comparison.Record(
            c.model.lyapunov.Value(traj.state(k)),
            comparison_solution(z0, c.lr.rho, c.lr.gamma, c.lr.mu, t, h), 1e-12);
      }
    }
    ++out.trajectories;
  }
  return out;
}

struct IdentityResult {
  double worst_root_residual = 0.0;
  double worst_identity = 0.0;
  std::size_t certificates = 0;
};

/// Root-equation residuals and the δ/Δ identities on the presets plus
/// `random_count` randomly parametrized certificates.
inline IdentityResult RunIdentities(std::size_t random_count, std::uint64_t seed) {
  IdentityResult r;
  auto record = [&](const RazumikhinCertificate& lr) {
    const double target = lr.kappa * lr.delta / lr.K;
    r.worst_root_residual = std::max(
        r.worst_root_residual,
        std::abs(lr.Delta + lr.m * lr.h * std::pow(lr.Delta, lr.mu) - target) /
            target);
    r.worst_identity = std::max(r.worst_identity,
                                std::abs(lr.A - lr.delta / lr.Delta) / lr.A);
    ++r.certificates;
  };
  auto record_lk = [&](const KrasovskiiCertificate& lk) {
    const double target = lk.a1 * std::pow(lk.delta, lk.gamma);
    const double lhs = lk.k1 * std::pow(lk.Delta, lk.gamma) +
                       lk.beta * std::pow(lk.Delta, lk.p());
    r.worst_root_residual =
        std::max(r.worst_root_residual, std::abs(lhs - target) / target);
    r.worst_identity = std::max(
        r.worst_identity,
        std::abs(lk.c_hat_1 - lk.delta / lk.Delta) / lk.c_hat_1);
    ++r.certificates;
  };
  for (const auto& c : PresetCases()) {
    record(c.lr);
    record_lk(c.lk);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(0.02, 0.98);
  const SystemModel ex1 = build_example({});
  ExampleSpec s2;
  s2.id = "ex2";
  const SystemModel ex2 = build_example(s2);
  for (std::size_t i = 0; i < random_count; ++i) {
    const SystemModel& model = i % 2 == 0 ? ex1 : ex2;
    try {
      RazumikhinParams lp;
      lp.alpha = 1.2 + 4.0 * frac(rng);
      const double H = compute_k4_H(model.lyapunov.constants(), model.growth,
                                    model.rhs.delay(), model.rhs.mu(), lp.alpha).H;
      lp.delta = frac(rng) * H;
      record(razumikhin_certificate(model, lp));
    } catch (const CertificateError&) {
    }
    try {
      KrasovskiiParams kp;
      kp.delta_scale = frac(rng);
      record_lk(krasovskii_certificate(model, kp));
    } catch (const CertificateError&) {
    }
  }
  return r;
}

}  // namespace homdelay::testing
