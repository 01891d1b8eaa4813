#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "homdelay/errors.hpp"
#include "homdelay/estimate.hpp"
#include "homdelay/model.hpp"
#include "homdelay/roots.hpp"

namespace homdelay {

struct RazumikhinParams {
  /// Razumikhin margin α > 1.
  double alpha = 2.0;
  /// Working radius; defaults to H·(1 - 1e-6).
  std::optional<double> delta;
  /// Comparison rate; defaults to (1 - rho_margin)·min{d̄, cap₂, cap₃}.
  std::optional<double> rho;
  double rho_margin = 1e-3;
};

struct RazumikhinCertificate {
  // Inputs.
  double alpha = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double m = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
  // Decay budget.
  double k4 = 0.0;
  double H = 0.0;
  double k5 = 0.0;
  // Attraction radius.
  double kappa = 0.0;
  double K = 0.0;
  double Delta = 0.0;
  // Comparison rate and its caps.
  double d_bar = 0.0;
  double cap2 = 0.0;
  double cap3 = 0.0;
  double rho = 0.0;
  // Envelope.
  double A = 0.0;
  double B = 0.0;
  double c_tilde_1 = 0.0;
  double c_tilde_2 = 0.0;

  EstimateCurve curve() const { return {c_tilde_1, c_tilde_2, mu}; }
};

struct K4H {
  double k4 = 0.0;
  double H = 0.0;
};

/// k₄ = 2hmm₂k₂(αk₁/k₀)^{μ/γ}(1 + (αk₁/k₀)^{(μ-1)/γ}), H = (w/k₄)^{1/(μ-1)}.
/// H is +∞ for h = 0.
inline K4H compute_k4_H(const LyapunovConstants& lc, const GrowthConstants& g,
                        double h, double mu, double alpha) {
  if (!(alpha > 1.0)) throw CertificateError("Razumikhin margin α must exceed 1");
  if (!(lc.k0 > 0 && lc.k1 > 0 && lc.k2 > 0 && lc.w > 0 && g.m > 0 &&
        g.m2 > 0 && h >= 0)) {
    throw CertificateError("compute_k4_H: constants must be positive");
  }
  const double r = alpha * lc.k1 / lc.k0;
  const double k4 = 2.0 * h * g.m * g.m2 * lc.k2 * std::pow(r, mu / lc.gamma) *
                    (1.0 + std::pow(r, (mu - 1.0) / lc.gamma));
  const double H = k4 > 0.0 ? std::pow(lc.w / k4, 1.0 / (mu - 1.0))
                            : std::numeric_limits<double>::infinity();
  return {k4, H};
}

/// k₅ = w - k₄δ^{μ-1}; δ ≥ H is a certificate failure.
inline double compute_k5(double w, double k4, double delta, double mu) {
  if (!(delta > 0.0)) throw CertificateError("δ must be positive");
  const double k5 = w - k4 * std::pow(delta, mu - 1.0);
  if (!(k5 > 0.0)) {
    throw CertificateError("k5 = " + std::to_string(k5) +
                           " ≤ 0: δ is not below H");
  }
  return k5;
}

struct KappaK {
  double kappa = 0.0;
  double K = 0.0;
};

/// κ = (k₀/k₁)^{1/γ}, K = (1 + (μ-1)mh(κδ)^{μ-1})^{1/(μ-1)}.
inline KappaK compute_kappa_K(const LyapunovConstants& lc,
                              const GrowthConstants& g, double h, double mu,
                              double delta) {
  if (!(delta > 0.0)) throw CertificateError("δ must be positive");
  const double kappa = std::pow(lc.k0 / lc.k1, 1.0 / lc.gamma);
  const double e = mu - 1.0;
  const double K =
      std::pow(1.0 + e * g.m * h * std::pow(kappa * delta, e), 1.0 / e);
  return {kappa, K};
}

/// Positive root of Δ + mhΔ^μ = κδ/K.
inline double solve_delta_razumikhin(double m, double h, double mu,
                                     double kappa, double K, double delta) {
  const double target = kappa * delta / K;
  if (!(target > 0.0)) throw CertificateError("κδ/K must be positive");
  return BisectIncreasing(
      [&](double d) { return d + m * h * std::pow(d, mu); }, target, 0.0,
      target * (1.0 + 1e-9));
}

struct RhoCaps {
  double d_bar = 0.0;
  double cap2 = 0.0;
  double cap3 = 0.0;
  double min() const { return std::min({d_bar, cap2, cap3}); }
};

/// The three upper limits on ρ: d̄ = k₅k₁^{-(γ+μ-1)/γ} and the strict bounds
/// implied by 1 + 2hρ((μ-1)/γ)k₀^{(μ-1)/γ}δ^{μ-1} < α^{(μ-1)/γ} and
/// 1 - ρ((μ-1)/γ)k₁^{(μ-1)/γ}K^{μ-1}hΔ^{μ-1} > 0.
inline RhoCaps rho_caps(const RazumikhinCertificate& c) {
  const double e = c.mu - 1.0;
  const double eg = e / c.gamma;
  const double inf = std::numeric_limits<double>::infinity();
  RhoCaps caps;
  caps.d_bar = c.k5 * std::pow(c.k1, -(c.gamma + e) / c.gamma);
  const double den2 = 2.0 * c.h * eg * std::pow(c.k0, eg) * std::pow(c.delta, e);
  caps.cap2 = den2 > 0.0 ? (std::pow(c.alpha, eg) - 1.0) / den2 : inf;
  const double den3 = eg * std::pow(c.k1, eg) * std::pow(c.K, e) * c.h *
                      std::pow(c.Delta, e);
  caps.cap3 = den3 > 0.0 ? 1.0 / den3 : inf;
  return caps;
}

struct RhoCheck {
  bool below_d_bar = false;
  bool condition2 = false;
  bool condition3 = false;
  bool all() const { return below_d_bar && condition2 && condition3; }
};

/// Evaluates the three ρ-conditions directly (not through the caps).
inline RhoCheck check_rho(const RazumikhinCertificate& c, double rho) {
  const double e = c.mu - 1.0;
  const double eg = e / c.gamma;
  RhoCheck out;
  out.below_d_bar =
      rho > 0.0 && rho < c.k5 * std::pow(c.k1, -(c.gamma + e) / c.gamma);
  out.condition2 = 1.0 + 2.0 * c.h * rho * eg * std::pow(c.k0, eg) *
                             std::pow(c.delta, e) <
                   std::pow(c.alpha, eg);
  out.condition3 = 1.0 - rho * eg * std::pow(c.k1, eg) * std::pow(c.K, e) *
                             c.h * std::pow(c.Delta, e) >
                   0.0;
  return out;
}

/// ρ = (1 - margin)·min{d̄, cap₂, cap₃}, re-verified against all conditions.
inline double select_rho(const RazumikhinCertificate& c,
                         double margin = 1e-3) {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw CertificateError("ρ margin must lie in (0, 1)");
  }
  const double rho = (1.0 - margin) * rho_caps(c).min();
  if (!(rho > 0.0) || !check_rho(c, rho).all()) {
    throw CertificateError("no admissible ρ");
  }
  return rho;
}

struct RazumikhinEnvelope {
  double A = 0.0;
  double B = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  EstimateCurve curve;
};

/// A = δ/Δ, B = ρ((μ-1)/γ)k₁^{(μ-1)/γ}(K(1+mhΔ^{μ-1}))^{μ-1},
/// c̃₁ = A/(1-BhΔ^{μ-1})^{1/(μ-1)}, c̃₂ = B/(1-BhΔ^{μ-1}).
inline RazumikhinEnvelope razumikhin_estimate(const RazumikhinCertificate& c) {
  const double e = c.mu - 1.0;
  RazumikhinEnvelope out;
  out.A = c.delta / c.Delta;
  const double inflation = c.K * (1.0 + c.m * c.h * std::pow(c.Delta, e));
  out.B = c.rho * (e / c.gamma) * std::pow(c.k1, e / c.gamma) *
          std::pow(inflation, e);
  const double denom = 1.0 - out.B * c.h * std::pow(c.Delta, e);
  if (!(denom > 0.0)) {
    throw CertificateError("1 - BhΔ^(μ-1) = " + std::to_string(denom) +
                           " ≤ 0");
  }
  out.c1 = out.A / std::pow(denom, 1.0 / e);
  out.c2 = out.B / denom;
  out.curve = {out.c1, out.c2, c.mu};
  return out;
}

/// Full pipeline: k₄, H, δ, k₅, κ, K, Δ, ρ, then the envelope.
inline RazumikhinCertificate razumikhin_certificate(
    const LyapunovConstants& lc, const GrowthConstants& g, double h,
    double mu, const RazumikhinParams& params = {}) {
  RazumikhinCertificate c;
  c.alpha = params.alpha;
  c.h = h;
  c.mu = mu;
  c.gamma = lc.gamma;
  c.m = g.m;
  c.k0 = lc.k0;
  c.k1 = lc.k1;
  const K4H kh = compute_k4_H(lc, g, h, mu, params.alpha);
  c.k4 = kh.k4;
  c.H = kh.H;
  if (params.delta) {
    c.delta = *params.delta;
  } else {
    if (!std::isfinite(c.H)) {
      throw CertificateError("h = 0 leaves H unbounded; supply δ");
    }
    c.delta = c.H * (1.0 - 1e-6);
  }
  if (!(c.delta > 0.0 && c.delta < c.H)) {
    throw CertificateError("δ = " + std::to_string(c.delta) +
                           " must lie in (0, H), H = " + std::to_string(c.H));
  }
  c.k5 = compute_k5(lc.w, c.k4, c.delta, mu);
  const KappaK kk = compute_kappa_K(lc, g, h, mu, c.delta);
  c.kappa = kk.kappa;
  c.K = kk.K;
  c.Delta = solve_delta_razumikhin(g.m, h, mu, c.kappa, c.K, c.delta);
  const RhoCaps caps = rho_caps(c);
  c.d_bar = caps.d_bar;
  c.cap2 = caps.cap2;
  c.cap3 = caps.cap3;
  if (params.rho) {
    c.rho = *params.rho;
    if (!check_rho(c, c.rho).all()) {
      throw CertificateError("ρ = " + std::to_string(c.rho) +
                             " violates the ρ-conditions");
    }
  } else {
    c.rho = select_rho(c, params.rho_margin);
  }
  const RazumikhinEnvelope env = razumikhin_estimate(c);
  c.A = env.A;
  c.B = env.B;
  c.c_tilde_1 = env.c1;
  c.c_tilde_2 = env.c2;
  return c;
}

inline RazumikhinCertificate razumikhin_certificate(
    const SystemModel& model, const RazumikhinParams& params = {}) {
  return razumikhin_certificate(model.lyapunov.constants(), model.growth,
                                model.rhs.delay(), model.rhs.mu(), params);
}

/// Bound K(‖φ‖ₕ + mh‖φ‖ₕ^μ) on ‖x(t)‖ for t ∈ [0, h].
inline double short_time_bound(double phi_norm, double m, double h, double mu,
                               double K) {
  return K * (phi_norm + m * h * std::pow(phi_norm, mu));
}

/// z(t) = z₀(1 + ρ((μ-1)/γ)z₀^{(μ-1)/γ}(t-h))^{-γ/(μ-1)}, the solution of
/// ż = -ρz^{(γ+μ-1)/γ} with z(h) = z₀.
inline double comparison_solution(double z0, double rho, double gamma,
                                  double mu, double t, double h) {
  if (z0 <= 0.0) return 0.0;
  const double e = mu - 1.0;
  return z0 * std::pow(1.0 + rho * (e / gamma) * std::pow(z0, e / gamma) *
                                 (t - h),
                       -gamma / e);
}

}  // namespace homdelay
