#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "homdelay/errors.hpp"
#include "homdelay/estimate.hpp"
#include "homdelay/history.hpp"
#include "homdelay/integrator.hpp"
#include "homdelay/model.hpp"
#include "homdelay/quadrature.hpp"
#include "homdelay/roots.hpp"

namespace homdelay {

/// Positive weights (w₁, w₂) with w₀ = w - w₁ - hw₂ > 0.
struct WeightSplit {
  double w1 = 0.0;
  double w2 = 0.0;

  double w0(double w, double h) const { return w - w1 - h * w2; }

  void Check(double w, double h) const {
    if (!(w1 > 0.0 && w2 > 0.0)) {
      throw CertificateError("weights w1, w2 must be positive");
    }
    if (!(w0(w, h) > 0.0)) {
      throw CertificateError("w0 = w - w1 - h*w2 = " +
                             std::to_string(w0(w, h)) + " ≤ 0");
    }
  }
};

/// (w/2, w/(4h)); for h = 0 the second weight is w/4.
inline WeightSplit default_weights(double w, double h) {
  return {0.5 * w, h > 0.0 ? w / (4.0 * h) : 0.25 * w};
}

enum class KrasovskiiPath { kAuto, kGeneral, kScalar };

inline std::string ToString(KrasovskiiPath p) {
  switch (p) {
    case KrasovskiiPath::kGeneral: return "general";
    case KrasovskiiPath::kScalar: return "scalar";
    default: return "auto";
  }
}

/// ẋ = α₁x^μ + α₂y^μ.
struct ScalarForm {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// True when n = 1 and μ is an odd integer ≥ 3.
inline bool scalar_path_applicable(const HomogeneousRHS& rhs) {
  const Rational mu = rhs.degree();
  return rhs.dimension() == 1 && mu.is_integer() && mu.num() >= 3 &&
         mu.num() % 2 == 1;
}

/// Reads α₁ = f(1, 0), α₂ = f(0, 1) and checks f(x, y) = α₁x^μ + α₂y^μ on a
/// sample grid.
inline ScalarForm scalar_form(const HomogeneousRHS& rhs) {
  if (!scalar_path_applicable(rhs)) {
    throw ConfigError("scalar path needs n = 1 and an odd integer μ ≥ 3");
  }
  Vector x(1), y(1);
  x << 1.0;
  y << 0.0;
  ScalarForm form;
  form.alpha1 = rhs.Evaluate(x, y)[0];
  x << 0.0;
  y << 1.0;
  form.alpha2 = rhs.Evaluate(x, y)[0];
  const double mu = rhs.mu();
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) {
      x << 0.25 * i;
      y << 0.3 * j;
      const double f = rhs.Evaluate(x, y)[0];
      const double model = form.alpha1 * SignedPow(x[0], rhs.degree()) +
                           form.alpha2 * SignedPow(y[0], rhs.degree());
      if (std::abs(f - model) > 1e-10 * (1.0 + std::abs(f))) {
        throw ConfigError("right-hand side is not of the form "
                          "a1*x^mu + a2*y^mu (mu = " +
                          std::to_string(mu) + ")");
      }
    }
  }
  return form;
}

struct KrasovskiiCertificate {
  KrasovskiiPath path = KrasovskiiPath::kGeneral;
  // Inputs.
  double h = 0.0;
  double mu = 0.0;
  /// Degree of V (2 on the scalar path).
  double gamma = 0.0;
  /// k₁ of V (1 on the scalar path).
  double k1 = 0.0;
  double w = 0.0;
  double w0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double chi = 0.0;
  double delta = 0.0;
  /// Scalar path only.
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  // Lower bound.
  double H1 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  // Upper bounds.
  double b1 = 0.0;
  double b2 = 0.0;
  double b = 0.0;
  double beta = 0.0;
  // Derivative bound.
  double L = 0.0;
  double c_w0 = 0.0;
  double c_w2 = 0.0;
  double c = 0.0;
  double H2 = 0.0;
  // Decay inequality.
  double L1 = 0.0;
  double L2 = 0.0;
  // Result.
  double Delta = 0.0;
  double c_hat_1 = 0.0;
  double c_hat_2 = 0.0;

  WeightSplit weights() const { return {w1, w2}; }
  EstimateCurve curve() const { return {c_hat_1, c_hat_2, mu}; }
  /// Exponent γ+μ-1 of the integral terms.
  double p() const { return gamma + mu - 1.0; }
};

/// Constants that depend on (χ, δ, weights) but not on Δ.
struct KrasovskiiConstants {
  double H1 = 0.0, H2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double b1 = 0.0, b2 = 0.0, b = 0.0;
  double beta = 0.0;
  double L = 0.0;
  double c_w0 = 0.0, c_w2 = 0.0, c = 0.0;
};

inline KrasovskiiConstants general_constants(const LyapunovConstants& lc,
                                             const GrowthConstants& g,
                                             double h, double mu, double chi,
                                             double delta,
                                             const WeightSplit& ws) {
  if (!(chi > 0.0)) throw CertificateError("χ must be positive");
  const double e = mu - 1.0;
  const double de = std::pow(delta, e);
  const double w0 = ws.w0(lc.w, h);
  const double inf = std::numeric_limits<double>::infinity();
  KrasovskiiConstants k;
  const double spread = h * lc.k2 * g.m * (1.0 + std::pow(chi, -2.0 * mu));
  k.H1 = spread > 0.0 ? std::pow(lc.k0 / spread, 1.0 / e) : inf;
  k.a1 = lc.k0 - spread * de;
  k.a2 = ws.w1 - lc.k2 * g.m * std::pow(chi, 2.0 * (lc.gamma - 1.0));
  k.b1 = lc.k1 + 2.0 * h * g.m * lc.k2 * de;
  k.b2 = (g.m * lc.k2 + ws.w1 + h * ws.w2) * de;
  k.b = std::max(k.b1, k.b2);
  k.beta = (2.0 * lc.k2 * g.m + ws.w1 + h * ws.w2) * h;
  k.L = g.m * g.m1 * lc.k2 + g.m * g.m * lc.k3;
  k.c_w0 = w0 - 4.0 * h * k.L * de;
  k.c_w2 = ws.w2 - 2.0 * k.L * de;
  k.c = std::min(k.c_w0, k.c_w2);
  double cap = ws.w2 / (2.0 * k.L);
  if (h > 0.0) {
    cap = std::min({cap, w0 / (4.0 * h * k.L), ws.w1 / (2.0 * h * k.L)});
  }
  k.H2 = std::pow(cap, 1.0 / e);
  return k;
}

inline KrasovskiiConstants scalar_constants(const ScalarForm& form, double h,
                                            double mu, double chi,
                                            double delta,
                                            const WeightSplit& ws) {
  if (!(chi > 0.0)) throw CertificateError("χ must be positive");
  const double e = mu - 1.0;
  const double de = std::pow(delta, e);
  const double a2abs = std::abs(form.alpha2);
  const double w = -2.0 * (form.alpha1 + form.alpha2);
  const double w0 = ws.w0(w, h);
  const double inf = std::numeric_limits<double>::infinity();
  KrasovskiiConstants k;
  k.H1 = a2abs > 0.0 ? std::pow(ws.w1 * chi * chi / a2abs, 1.0 / e) : inf;
  k.a1 = 1.0 - chi * chi * h * a2abs;
  k.a2 = ws.w1 - a2abs * de / (chi * chi);
  k.b1 = 1.0 + a2abs * h;
  k.b2 = (a2abs * (1.0 + a2abs * h) * de + ws.w1 + h * ws.w2) * de;
  k.b = std::max(k.b1, k.b2);
  k.beta = (2.0 * a2abs + form.alpha2 * form.alpha2 * h * de + ws.w1 +
            h * ws.w2) *
           h;
  k.L = a2abs * std::abs(form.alpha1 + form.alpha2);
  k.c_w0 = w0 - h * k.L * de;
  k.c_w2 = ws.w2 - k.L * de;
  k.c = std::min(k.c_w0, k.c_w2);
  double cap = k.L > 0.0 ? ws.w2 / k.L : inf;
  if (h > 0.0 && k.L > 0.0) cap = std::min(cap, w0 / (h * k.L));
  k.H2 = std::pow(cap, 1.0 / e);
  return k;
}

/// (2·max{1, h})^{p/q - 1}.
inline double mixing_constant_general(double p, double q, double h) {
  if (!(p > q && q >= 1.0)) throw Error("mixing_constant_general needs p > q ≥ 1");
  return std::pow(2.0 * std::max(1.0, h), p / q - 1.0);
}

/// 2^{k-2}(1+h)^{k-1} for integer k ≥ 2.
inline double mixing_constant_scalar(double k, double h) {
  if (!(k >= 2.0) || k != std::floor(k)) {
    throw Error("mixing_constant_scalar needs an integer k ≥ 2");
  }
  return std::pow(2.0, k - 2.0) * std::pow(1.0 + h, k - 1.0);
}

/// Positive root of k₁Δ^γ + βΔ^{γ+μ-1} = a₁δ^γ. The scalar-path equation
/// Δ² + βΔ^{μ+1} = a₁δ² is the case k₁ = 1, γ = 2.
inline double solve_delta_krasovskii(double k1, double beta, double a1,
                                     double delta, double gamma, double mu) {
  const double target = a1 * std::pow(delta, gamma);
  if (!(target > 0.0)) throw CertificateError("a1*δ^γ must be positive");
  const double hi = std::pow(a1 / k1, 1.0 / gamma) * delta * (1.0 + 1e-9);
  return BisectIncreasing(
      [&](double d) {
        return k1 * std::pow(d, gamma) + beta * std::pow(d, gamma + mu - 1.0);
      },
      target, 0.0, hi);
}

struct KrasovskiiEnvelope {
  double c1 = 0.0;
  double c2 = 0.0;
  EstimateCurve curve;
};

/// Envelope constants (ĉ₁, ĉ₂) from a certificate with Δ filled in.
inline KrasovskiiEnvelope krasovskii_estimate(const KrasovskiiCertificate& k) {
  const double e = k.mu - 1.0;
  const double num = k.k1 + k.beta * std::pow(k.Delta, e);
  KrasovskiiEnvelope out;
  if (k.path == KrasovskiiPath::kScalar) {
    out.c1 = std::sqrt(num / k.a1);
    out.c2 = (k.c * e / k.b) *
             std::pow(num / (2.0 * k.b * (1.0 + k.h)), e / 2.0);
  } else {
    out.c1 = std::pow(num / k.a1, 1.0 / k.gamma);
    out.c2 = (k.c / k.b) * (e / k.gamma) *
             std::pow(num / (2.0 * k.b * std::max(1.0, k.h)), e / k.gamma);
  }
  out.curve = {out.c1, out.c2, k.mu};
  return out;
}

struct KrasovskiiParams {
  KrasovskiiPath path = KrasovskiiPath::kAuto;
  std::optional<double> chi;
  std::optional<double> w1;
  std::optional<double> w2;
  std::optional<double> delta;
  /// δ as a fraction of min{H₁, H₂}; ignored when `delta` is set.
  std::optional<double> delta_scale;
};

namespace detail {

inline void FinishKrasovskii(KrasovskiiCertificate& k,
                             const KrasovskiiConstants& kc) {
  k.H1 = kc.H1;
  k.H2 = kc.H2;
  k.a1 = kc.a1;
  k.a2 = kc.a2;
  k.b1 = kc.b1;
  k.b2 = kc.b2;
  k.b = kc.b;
  k.beta = kc.beta;
  k.L = kc.L;
  k.c_w0 = kc.c_w0;
  k.c_w2 = kc.c_w2;
  k.c = kc.c;
  if (!(k.delta > 0.0 && k.delta < std::min(k.H1, k.H2))) {
    throw CertificateError("δ = " + std::to_string(k.delta) +
                           " must lie in (0, min{H1, H2}) = (0, " +
                           std::to_string(std::min(k.H1, k.H2)) + ")");
  }
  if (!(k.a1 > 0.0)) throw CertificateError("a1 ≤ 0");
  if (!(k.a2 > 0.0)) throw CertificateError("a2 ≤ 0");
  if (!(k.c > 0.0)) throw CertificateError("c ≤ 0");
  k.L1 = k.path == KrasovskiiPath::kScalar
             ? mixing_constant_scalar((k.mu + 1.0) / 2.0, k.h)
             : mixing_constant_general(k.gamma + k.mu - 1.0, k.gamma, k.h);
  k.L2 = k.c / (std::pow(k.b, (k.gamma + k.mu - 1.0) / k.gamma) * k.L1);
  k.Delta = solve_delta_krasovskii(k.k1, k.beta, k.a1, k.delta, k.gamma, k.mu);
  const KrasovskiiEnvelope env = krasovskii_estimate(k);
  k.c_hat_1 = env.c1;
  k.c_hat_2 = env.c2;
}

inline double ResolveDelta(const KrasovskiiParams& p, double cap,
                           double fallback) {
  if (p.delta) return *p.delta;
  if (p.delta_scale) return *p.delta_scale * cap;
  return fallback;
}

}  // namespace detail

/// General-path certificate from the Lyapunov and growth constants.
inline KrasovskiiCertificate krasovskii_general(const LyapunovConstants& lc,
                                                const GrowthConstants& g,
                                                double h, double mu,
                                                const KrasovskiiParams& p = {}) {
  KrasovskiiCertificate k;
  k.path = KrasovskiiPath::kGeneral;
  k.h = h;
  k.mu = mu;
  k.gamma = lc.gamma;
  k.k1 = lc.k1;
  k.w = lc.w;
  const WeightSplit def = default_weights(lc.w, h);
  const WeightSplit ws{p.w1.value_or(def.w1), p.w2.value_or(def.w2)};
  ws.Check(lc.w, h);
  k.w0 = ws.w0(lc.w, h);
  k.w1 = ws.w1;
  k.w2 = ws.w2;
  // Default χ puts a₂ at w₁/2.
  k.chi = p.chi.value_or(
      std::pow(ws.w1 / (2.0 * lc.k2 * g.m), 1.0 / (2.0 * (lc.gamma - 1.0))));
  // H₁, H₂ do not depend on δ.
  const KrasovskiiConstants caps =
      general_constants(lc, g, h, mu, k.chi, 1.0, ws);
  const double cap = std::min(caps.H1, caps.H2);
  k.delta = detail::ResolveDelta(p, cap, (1.0 - 1e-6) * cap);
  detail::FinishKrasovskii(
      k, general_constants(lc, g, h, mu, k.chi, k.delta, ws));
  return k;
}

/// Scalar-path certificate for ẋ = α₁x^μ + α₂y^μ with V = x² and
/// w = -2(α₁+α₂).
inline KrasovskiiCertificate krasovskii_scalar(const ScalarForm& form,
                                               double h, double mu,
                                               const KrasovskiiParams& p = {}) {
  if (!(mu >= 3.0) || mu != std::floor(mu) ||
      static_cast<long>(mu) % 2 != 1) {
    throw ConfigError("scalar path needs an odd integer μ ≥ 3");
  }
  const double w = -2.0 * (form.alpha1 + form.alpha2);
  if (!(w > 0.0)) throw CertificateError("scalar path needs α1 + α2 < 0");
  KrasovskiiCertificate k;
  k.path = KrasovskiiPath::kScalar;
  k.h = h;
  k.mu = mu;
  k.gamma = 2.0;
  k.k1 = 1.0;
  k.w = w;
  k.alpha1 = form.alpha1;
  k.alpha2 = form.alpha2;
  const WeightSplit def = default_weights(w, h);
  const WeightSplit ws{p.w1.value_or(def.w1), p.w2.value_or(def.w2)};
  ws.Check(w, h);
  k.w0 = ws.w0(w, h);
  k.w1 = ws.w1;
  k.w2 = ws.w2;
  const double a2abs = std::abs(form.alpha2);
  // Default χ gives a₁ = 1/2.
  k.chi = p.chi.value_or(h > 0.0 && a2abs > 0.0
                             ? std::sqrt(1.0 / (2.0 * h * a2abs))
                             : 1.0);
  const KrasovskiiConstants caps =
      scalar_constants(form, h, mu, k.chi, 1.0, ws);
  const double cap = std::min(caps.H1, caps.H2);
  // Default δ keeps a₂ ≥ w₁/2.
  const double fallback = std::min(std::pow(2.0, -1.0 / (mu - 1.0)) * caps.H1,
                                   (1.0 - 1e-6) * caps.H2);
  k.delta = detail::ResolveDelta(p, cap, fallback);
  detail::FinishKrasovskii(k,
                           scalar_constants(form, h, mu, k.chi, k.delta, ws));
  return k;
}

inline KrasovskiiPath resolve_path(const HomogeneousRHS& rhs,
                                   KrasovskiiPath requested) {
  if (requested != KrasovskiiPath::kAuto) return requested;
  return scalar_path_applicable(rhs) ? KrasovskiiPath::kScalar
                                     : KrasovskiiPath::kGeneral;
}

inline KrasovskiiCertificate krasovskii_certificate(
    const SystemModel& model, const KrasovskiiParams& p = {}) {
  const KrasovskiiPath path = resolve_path(model.rhs, p.path);
  if (path == KrasovskiiPath::kScalar) {
    return krasovskii_scalar(scalar_form(model.rhs), model.rhs.delay(),
                             model.rhs.mu(), p);
  }
  return krasovskii_general(model.lyapunov.constants(), model.growth,
                            model.rhs.delay(), model.rhs.mu(), p);
}

// ---------------------------------------------------------------------------
// Functional

/// Node values of a segment on a uniform grid over [-h, 0], one column per
/// node, so that history segments and solution windows share one code path.
struct SegmentNodes {
  Matrix nodes;
  double spacing = 0.0;
  double h = 0.0;

  static SegmentNodes Of(const HistorySegment& phi) {
    return {phi.nodes(), phi.spacing(), phi.delay()};
  }
  std::size_t intervals() const {
    return static_cast<std::size_t>(nodes.cols()) - 1;
  }
  double theta(std::size_t i) const {
    return -h + h * static_cast<double>(i) / static_cast<double>(intervals());
  }
  /// Simpson integral of g(θ, φ(θ)) over [-h, 0].
  template <typename F>
  double Integrate(F&& g) const {
    if (h == 0.0) return 0.0;
    const auto w = SimpsonWeights(intervals(), spacing);
    double sum = 0.0;
    for (std::size_t i = 0; i <= intervals(); ++i) {
      sum += w[i] * g(theta(i), nodes.col(static_cast<Eigen::Index>(i)));
    }
    return sum;
  }
  double sup_norm() const { return nodes.colwise().norm().maxCoeff(); }
};

namespace detail {
inline void CheckGrid(const SegmentNodes& s) {
  if (s.h > 0.0 && s.intervals() < HistorySegment::kMinIntervals) {
    throw Error("functional quadrature needs at least 4 intervals");
  }
}
}  // namespace detail

/// V(φ(0)) + ∇V(φ(0))ᵀ∫f(φ(0), φ(θ))dθ + ∫(w₁+(h+θ)w₂)‖φ(θ)‖^{γ+μ-1}dθ.
inline double functional_value_general(const SegmentNodes& s,
                                       const LyapunovData& lyap,
                                       const HomogeneousRHS& rhs,
                                       const WeightSplit& ws) {
  detail::CheckGrid(s);
  const std::size_t n = rhs.dimension();
  const Vector x0 = s.nodes.col(s.nodes.cols() - 1);
  const double p = lyap.gamma() + rhs.mu() - 1.0;
  Vector integral = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector f(static_cast<Eigen::Index>(n));
  if (s.h > 0.0) {
    const auto w = SimpsonWeights(s.intervals(), s.spacing);
    for (std::size_t i = 0; i <= s.intervals(); ++i) {
      rhs.EvaluateInto(x0, s.nodes.col(static_cast<Eigen::Index>(i)), f);
      integral += w[i] * f;
    }
  }
  const double weighted = s.Integrate([&](double th, const auto& phi) {
    return (ws.w1 + (s.h + th) * ws.w2) * std::pow(phi.norm(), p);
  });
  return lyap.Value(x0) + lyap.Gradient(x0).dot(integral) + weighted;
}

/// (φ(0) + α₂∫φ^μ)² + ∫(w₁+(h+θ)w₂)φ^{μ+1}dθ.
inline double functional_value_scalar(const SegmentNodes& s, double alpha2,
                                      Rational mu, const WeightSplit& ws) {
  detail::CheckGrid(s);
  const double x0 = s.nodes(0, s.nodes.cols() - 1);
  const Rational mu1 = mu + Rational(1);
  const double inner = s.Integrate(
      [&](double, const auto& phi) { return SignedPow(phi[0], mu); });
  const double weighted = s.Integrate([&](double th, const auto& phi) {
    return (ws.w1 + (s.h + th) * ws.w2) * SignedPow(phi[0], mu1);
  });
  const double head = x0 + alpha2 * inner;
  return head * head + weighted;
}

/// v(φ) on the certificate's path with its weights.
inline double functional_value(const SegmentNodes& s,
                               const KrasovskiiCertificate& k,
                               const SystemModel& model) {
  if (k.path == KrasovskiiPath::kScalar) {
    return functional_value_scalar(s, k.alpha2, model.rhs.degree(),
                                   k.weights());
  }
  return functional_value_general(s, model.lyapunov, model.rhs, k.weights());
}

inline double functional_value(const HistorySegment& phi,
                               const KrasovskiiCertificate& k,
                               const SystemModel& model) {
  return functional_value(SegmentNodes::Of(phi), k, model);
}

/// Both sides of the lower bound and the two upper bounds on v(φ).
struct SandwichBounds {
  /// a₁‖φ(0)‖^γ + a₂∫‖φ‖^{γ+μ-1}
  double lower = 0.0;
  /// b(‖φ(0)‖^γ + ∫‖φ‖^γ)
  double upper_b = 0.0;
  /// k₁‖φ(0)‖^γ + β‖φ‖ₕ^{γ+μ-1}
  double upper_beta = 0.0;
};

inline SandwichBounds sandwich_bounds(const SegmentNodes& s,
                                      const KrasovskiiCertificate& k) {
  const double x0 = s.nodes.col(s.nodes.cols() - 1).norm();
  const double g = k.gamma;
  const double p = k.p();
  const double int_p =
      s.Integrate([&](double, const auto& phi) { return std::pow(phi.norm(), p); });
  const double int_g =
      s.Integrate([&](double, const auto& phi) { return std::pow(phi.norm(), g); });
  SandwichBounds out;
  out.lower = k.a1 * std::pow(x0, g) + k.a2 * int_p;
  out.upper_b = k.b * (std::pow(x0, g) + int_g);
  out.upper_beta = k.k1 * std::pow(x0, g) + k.beta * std::pow(s.sup_norm(), p);
  return out;
}

/// Window x_t of a full-storage trajectory at grid index i, on the
/// trajectory's own grid. Window parts before t = 0 come from the history.
inline SegmentNodes window_nodes(const Trajectory& traj, std::size_t i) {
  const double h = traj.delay();
  const double step = traj.step();
  const auto lag = static_cast<std::size_t>(std::llround(h / step));
  const auto n = static_cast<Eigen::Index>(traj.dimension());
  SegmentNodes s;
  s.h = h;
  s.spacing = step;
  s.nodes.resize(n, static_cast<Eigen::Index>(lag + 1));
  Vector tmp(n);
  for (std::size_t j = 0; j <= lag; ++j) {
    const auto k = static_cast<std::ptrdiff_t>(i + j) -
                   static_cast<std::ptrdiff_t>(lag);
    if (k >= 0) {
      s.nodes.col(static_cast<Eigen::Index>(j)) =
          traj.state(static_cast<std::size_t>(k));
    } else {
      traj.history().EvaluateInto(static_cast<double>(k) * step, tmp);
      s.nodes.col(static_cast<Eigen::Index>(j)) = tmp;
    }
  }
  return s;
}

struct FunctionalSample {
  double t = 0.0;
  double v = 0.0;
  double dvdt = 0.0;
  /// -c(‖x(t)‖^{γ+μ-1} + ∫‖x(t+θ)‖^{γ+μ-1}dθ)
  double derivative_bound = 0.0;
  /// -L₂v^{(γ+μ-1)/γ}
  double decay_bound = 0.0;
  bool derivative_ok = true;
  bool decay_ok = true;
};

struct TraceOptions {
  /// Sample every `stride`-th grid node.
  std::size_t stride = 1;
  /// Allowed excess of dv/dt over a bound: slack_abs + slack_rel·|bound|.
  double slack_abs = 1e-8;
  double slack_rel = 0.0;
  /// Last time sampled; defaults to the end of the trajectory.
  std::optional<double> until;
};

/// v(x_t) and its central-difference derivative along a full-storage
/// trajectory, checked against the derivative bound and the decay inequality.
/// Throws when a window leaves the δ-ball.
inline std::vector<FunctionalSample> functional_derivative_trace(
    const Trajectory& traj, const KrasovskiiCertificate& k,
    const SystemModel& model, const TraceOptions& opt = {}) {
  if (!traj.full_storage()) {
    throw Error("functional_derivative_trace needs a full-storage trajectory");
  }
  if (traj.size() < 3) return {};
  const double step = traj.step();
  const double p = k.p();
  std::size_t last = traj.size() - 2;
  if (opt.until) {
    last = std::min(last, static_cast<std::size_t>(*opt.until / step));
  }
  std::vector<FunctionalSample> out;
  auto value_at = [&](std::size_t i) {
    return functional_value(window_nodes(traj, i), k, model);
  };
  for (std::size_t i = 1; i <= last; i += std::max<std::size_t>(opt.stride, 1)) {
    const SegmentNodes win = window_nodes(traj, i);
    if (win.sup_norm() > k.delta) {
      throw CertificateError("window at t=" + std::to_string(traj.time(i)) +
                             " leaves the δ-ball");
    }
    FunctionalSample s;
    s.t = traj.time(i);
    s.v = functional_value(win, k, model);
    s.dvdt = (value_at(i + 1) - value_at(i - 1)) / (2.0 * step);
    const double head = std::pow(traj.norm(i), p);
    const double tail = win.Integrate(
        [&](double, const auto& phi) { return std::pow(phi.norm(), p); });
    s.derivative_bound = -k.c * (head + tail);
    s.decay_bound = -k.L2 * std::pow(std::max(s.v, 0.0), p / k.gamma);
    s.derivative_ok =
        s.dvdt <= s.derivative_bound + opt.slack_abs +
                      opt.slack_rel * std::abs(s.derivative_bound);
    s.decay_ok = s.dvdt <= s.decay_bound + opt.slack_abs +
                               opt.slack_rel * std::abs(s.decay_bound);
    out.push_back(s);
  }
  return out;
}

}  // namespace homdelay
