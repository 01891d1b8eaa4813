#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "homdelay/errors.hpp"
#include "homdelay/history.hpp"
#include "homdelay/integrator.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/model.hpp"
#include "homdelay/razumikhin.hpp"

namespace homdelay {

struct EnvelopeSample {
  double t = 0.0;
  double norm = 0.0;
  double razumikhin = 0.0;
  double krasovskii = 0.0;
};

/// Which envelope is smaller over one decade [10^k, 10^{k+1}) of time.
struct DecadeVerdict {
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// "razumikhin", "krasovskii" or "mixed".
  std::string tighter;
};

struct ComparisonReport {
  RazumikhinCertificate razumikhin;
  KrasovskiiCertificate krasovskii;
  double delta = 0.0;
  // Constants compared in the discussion of the two methods.
  double B = 0.0;
  double B_tilde = 0.0;
  double k5_over_k1 = 0.0;
  double c_over_b = 0.0;
  double k0_over_k1 = 0.0;
  double a1_over_b = 0.0;
  /// |ĉ₁Δ_LK - δ|/δ and |AΔ_LR - δ|/δ.
  double krasovskii_identity_residual = 0.0;
  double razumikhin_identity_residual = 0.0;
  // Simulation.
  double phi_norm = 0.0;
  double horizon = 0.0;
  double step = 0.0;
  std::size_t nodes_checked = 0;
  bool inside_razumikhin_region = false;
  bool inside_krasovskii_region = false;
  /// Largest ‖x(t)‖/envelope(t) over all grid nodes.
  double razumikhin_worst_ratio = 0.0;
  double krasovskii_worst_ratio = 0.0;
  bool razumikhin_dominates = true;
  bool krasovskii_dominates = true;
  /// Razumikhin envelope strictly below the Krasovskii one at every node
  /// with t ≥ 10h.
  bool razumikhin_tighter_after_ten_delays = true;
  std::vector<EnvelopeSample> samples;
  std::vector<DecadeVerdict> decades;
};

/// B̃ = (k₅/k₁)((μ-1)/γ)(k₀/k₁)^{(μ-1)/γ}(δ/Δ)^{μ-1}.
inline double b_tilde(const RazumikhinCertificate& c) {
  const double eg = (c.mu - 1.0) / c.gamma;
  return (c.k5 / c.k1) * eg * std::pow(c.k0 / c.k1, eg) *
         std::pow(c.delta / c.Delta, c.mu - 1.0);
}

struct CompareOptions {
  double horizon = 0.0;
  double step = 0.0;
  std::size_t points_per_decade = 100;
};

/// Both certificates at the shared δ, then one simulation from `phi` with
/// both envelopes checked at every grid node.
inline ComparisonReport compare(const SystemModel& model,
                                RazumikhinParams lr_params,
                                KrasovskiiParams lk_params, double delta,
                                const HistorySegment& phi,
                                const CompareOptions& opt) {
  lr_params.delta = delta;
  lk_params.delta = delta;
  lk_params.delta_scale.reset();
  ComparisonReport r;
  r.delta = delta;
  r.razumikhin = razumikhin_certificate(model, lr_params);
  r.krasovskii = krasovskii_certificate(model, lk_params);
  const auto& lr = r.razumikhin;
  const auto& lk = r.krasovskii;
  r.B = lr.B;
  r.B_tilde = b_tilde(lr);
  r.k5_over_k1 = lr.k5 / lr.k1;
  r.c_over_b = lk.c / lk.b;
  r.k0_over_k1 = lr.k0 / lr.k1;
  r.a1_over_b = lk.a1 / lk.b;
  r.krasovskii_identity_residual = std::abs(lk.c_hat_1 * lk.Delta - delta) / delta;
  r.razumikhin_identity_residual = std::abs(lr.A * lr.Delta - delta) / delta;

  const double h = model.rhs.delay();
  r.phi_norm = phi.sup_norm();
  r.horizon = opt.horizon > 0.0 ? opt.horizon : default_horizon(h);
  r.step = opt.step > 0.0 ? opt.step : default_step(h);
  r.inside_razumikhin_region = r.phi_norm < lr.Delta;
  r.inside_krasovskii_region = r.phi_norm < lk.Delta;

  const EstimateCurve lr_curve = lr.curve();
  const EstimateCurve lk_curve = lk.curve();
  const double ten_delays = 10.0 * h;
  // Tolerance for rounding in the envelope evaluation only.
  const double tol = 1e-12;
  IntegrationOptions io;
  io.output = OutputMode::kLogSpaced;
  io.points_per_decade = opt.points_per_decade;
  io.observer = [&](double t, ConstVectorRef x) {
    const double norm = x.norm();
    const double e_lr = lr_curve(r.phi_norm, t);
    const double e_lk = lk_curve(r.phi_norm, t);
    ++r.nodes_checked;
    if (e_lr > 0.0) r.razumikhin_worst_ratio = std::max(r.razumikhin_worst_ratio, norm / e_lr);
    if (e_lk > 0.0) r.krasovskii_worst_ratio = std::max(r.krasovskii_worst_ratio, norm / e_lk);
    if (norm > e_lr * (1.0 + tol)) r.razumikhin_dominates = false;
    if (norm > e_lk * (1.0 + tol)) r.krasovskii_dominates = false;
    if (t >= ten_delays && !(e_lr < e_lk)) {
      r.razumikhin_tighter_after_ten_delays = false;
    }
  };
  const Trajectory traj = integrate(model.rhs, phi, r.horizon, r.step, io);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.time(k);
    r.samples.push_back({t, traj.norm(k), lr_curve(r.phi_norm, t),
                         lk_curve(r.phi_norm, t)});
  }
  // Decade verdicts over the stored samples.
  if (r.horizon > 0.0) {
    double lo = std::pow(10.0, std::floor(std::log10(r.step)));
    while (lo < r.horizon) {
      const double hi = lo * 10.0;
      bool lr_all = true, lk_all = true, any = false;
      for (const auto& s : r.samples) {
        if (s.t < lo || s.t >= hi) continue;
        any = true;
        if (!(s.razumikhin < s.krasovskii)) lr_all = false;
        if (!(s.krasovskii < s.razumikhin)) lk_all = false;
      }
      if (any) {
        r.decades.push_back(
            {lo, hi, lr_all ? "razumikhin" : (lk_all ? "krasovskii" : "mixed")});
      }
      lo = hi;
    }
  }
  return r;
}

/// Figure data: t, ‖x(t)‖ and both envelopes at log-spaced nodes. Requires
/// ‖φ‖ₕ < min{Δ_LR, Δ_LK} unless `allow_outside` is set.
inline std::vector<EnvelopeSample> emit_figure_data(
    const SystemModel& model, const RazumikhinCertificate& lr,
    const KrasovskiiCertificate& lk, const HistorySegment& phi, double horizon,
    double step, bool allow_outside = false,
    std::size_t points_per_decade = 100) {
  const double norm = phi.sup_norm();
  if (!allow_outside && !(norm < std::min(lr.Delta, lk.Delta))) {
    throw CertificateError(
        "initial function norm " + std::to_string(norm) +
        " is not below min{Delta_LR, Delta_LK} = " +
        std::to_string(std::min(lr.Delta, lk.Delta)));
  }
  IntegrationOptions io;
  io.output = OutputMode::kLogSpaced;
  io.points_per_decade = points_per_decade;
  const Trajectory traj = integrate(model.rhs, phi, horizon, step, io);
  const EstimateCurve a = lr.curve(), b = lk.curve();
  std::vector<EnvelopeSample> out;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.time(k);
    out.push_back({t, traj.norm(k), a(norm, t), b(norm, t)});
  }
  return out;
}

}  // namespace homdelay
