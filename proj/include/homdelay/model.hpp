#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homdelay/errors.hpp"
#include "homdelay/polynomial.hpp"
#include "homdelay/rational.hpp"
#include "homdelay/sampling.hpp"

namespace homdelay {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<Eigen::VectorXd>;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<Eigen::MatrixXd>;

/// out = f(x, y).
using RhsFunction =
    std::function<void(ConstVectorRef x, ConstVectorRef y, VectorRef out)>;
/// out = ∂f/∂x (x, y) or ∂f/∂y (x, y), an n×n matrix.
using JacobianFunction =
    std::function<void(ConstVectorRef x, ConstVectorRef y, MatrixRef out)>;

/// One declarative right-hand-side term: coeff · Π x_i^{a_i} Π y_i^{b_i}
/// contributing to component `target`.
struct RhsTerm {
  std::size_t target = 0;
  double coeff = 0.0;
  std::vector<Rational> x_exponents;
  std::vector<Rational> y_exponents;
};

/// Spectral norm (largest singular value).
inline double SpectralNorm(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// Right-hand side f(x, y) of ẋ(t) = f(x(t), x(t-h)), homogeneous of degree
/// μ > 1. Immutable; copies share the evaluators.
class HomogeneousRHS {
 public:
  /// Declarative polynomial system. Every term must have total degree μ.
  static HomogeneousRHS FromTerms(std::size_t n, Rational mu, double h,
                                  std::vector<RhsTerm> terms) {
    HomogeneousRHS rhs(n, mu, h);
    std::vector<std::vector<Monomial>> per_component(n);
    for (const auto& t : terms) {
      if (t.target >= n) {
        throw DimensionError("term target " + std::to_string(t.target) +
                             " out of range for n=" + std::to_string(n));
      }
      if (t.x_exponents.size() != n || t.y_exponents.size() != n) {
        throw DimensionError("term exponent lists must have length n");
      }
      Monomial mono{t.coeff, t.x_exponents};
      mono.exponents.insert(mono.exponents.end(), t.y_exponents.begin(),
                            t.y_exponents.end());
      if (!(mono.degree() == mu)) {
        throw ConfigError("term of total degree " + mono.degree().ToString() +
                          " in a system of degree " + mu.ToString());
      }
      per_component[t.target].push_back(std::move(mono));
    }
    auto components = std::make_shared<std::vector<Polynomial>>();
    for (auto& monos : per_component) {
      components->emplace_back(2 * n, std::move(monos));
    }
    rhs.terms_ = std::move(terms);
    rhs.f_ = [components, n](ConstVectorRef x, ConstVectorRef y,
                             VectorRef out) {
      Vector xy(2 * n);
      xy << x, y;
      for (std::size_t i = 0; i < n; ++i) out[i] = (*components)[i].Value(xy);
    };
    auto jac = [components, n](ConstVectorRef x, ConstVectorRef y,
                               MatrixRef out, std::size_t shift) {
      Vector xy(2 * n);
      xy << x, y;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          out(i, j) = (*components)[i].Partial(xy, j + shift);
        }
      }
    };
    rhs.dfdx_ = [jac](ConstVectorRef x, ConstVectorRef y, MatrixRef out) {
      jac(x, y, out, 0);
    };
    rhs.dfdy_ = [jac, n](ConstVectorRef x, ConstVectorRef y, MatrixRef out) {
      jac(x, y, out, n);
    };
    // Scalar fast path for the inner integration loop.
    if (n == 1) rhs.scalar_ = MakeScalarFast(rhs.terms_);
    return rhs;
  }

  /// System given by evaluators. Missing partials fall back to central
  /// finite differences when `allow_finite_differences` is set.
  static HomogeneousRHS FromFunction(std::size_t n, Rational mu, double h,
                                     RhsFunction f,
                                     JacobianFunction dfdx = nullptr,
                                     JacobianFunction dfdy = nullptr,
                                     bool allow_finite_differences = true) {
    HomogeneousRHS rhs(n, mu, h);
    rhs.f_ = std::move(f);
    rhs.dfdx_ = std::move(dfdx);
    rhs.dfdy_ = std::move(dfdy);
    rhs.allow_fd_ = allow_finite_differences;
    return rhs;
  }

  std::size_t dimension() const { return n_; }
  Rational degree() const { return mu_; }
  double mu() const { return mu_.value(); }
  double delay() const { return h_; }
  const std::vector<RhsTerm>& terms() const { return terms_; }
  bool is_declarative() const { return !terms_.empty(); }

  HomogeneousRHS WithDelay(double h) const {
    if (!(h >= 0.0)) throw Error("delay must be nonnegative");
    HomogeneousRHS copy = *this;
    copy.h_ = h;
    return copy;
  }

  bool has_analytic_partials() const { return dfdx_ && dfdy_; }
  /// True when at least one partial is approximated by finite differences.
  bool uses_finite_differences() const {
    return !has_analytic_partials() && allow_fd_;
  }
  bool partials_available() const {
    return has_analytic_partials() || allow_fd_;
  }

  /// Unchecked evaluation for hot loops; sizes must already match.
  void EvaluateInto(ConstVectorRef x, ConstVectorRef y, VectorRef out) const {
    if (scalar_) {
      out[0] = scalar_->Eval(x[0], y[0]);
      return;
    }
    f_(x, y, out);
  }

  Vector Evaluate(const Vector& x, const Vector& y) const {
    CheckSizes(x, y);
    Vector out(n_);
    EvaluateInto(x, y, out);
    return out;
  }

  Matrix JacobianX(const Vector& x, const Vector& y) const {
    return Jacobian(x, y, dfdx_, /*wrt_y=*/false);
  }
  Matrix JacobianY(const Vector& x, const Vector& y) const {
    return Jacobian(x, y, dfdy_, /*wrt_y=*/true);
  }

 private:
  // Exact integer-exponent polynomial in (x, y) for n = 1.
  struct ScalarFast {
    struct Term {
      double coeff;
      Rational ex, ey;
    };
    std::vector<Term> terms;
    double Eval(double x, double y) const {
      double sum = 0.0;
      for (const auto& t : terms) {
        double v = t.coeff;
        if (t.ex.num() != 0) v *= SignedPow(x, t.ex);
        if (t.ey.num() != 0) v *= SignedPow(y, t.ey);
        sum += v;
      }
      return sum;
    }
  };

  static std::shared_ptr<const ScalarFast> MakeScalarFast(
      const std::vector<RhsTerm>& terms) {
    auto fast = std::make_shared<ScalarFast>();
    for (const auto& t : terms) {
      fast->terms.push_back({t.coeff, t.x_exponents[0], t.y_exponents[0]});
    }
    return fast;
  }

  HomogeneousRHS(std::size_t n, Rational mu, double h)
      : n_(n), mu_(mu), h_(h) {
    if (n_ == 0) throw DimensionError("dimension must be positive");
    if (!(Rational(1) < mu_)) {
      throw ConfigError("homogeneity degree must exceed 1, got " +
                        mu_.ToString());
    }
    if (!(h_ >= 0.0)) throw ConfigError("delay must be nonnegative");
  }

  void CheckSizes(const Vector& x, const Vector& y) const {
    if (static_cast<std::size_t>(x.size()) != n_ ||
        static_cast<std::size_t>(y.size()) != n_) {
      throw DimensionError("expected vectors of size " + std::to_string(n_) +
                           ", got " + std::to_string(x.size()) + " and " +
                           std::to_string(y.size()));
    }
  }

  Matrix Jacobian(const Vector& x, const Vector& y,
                  const JacobianFunction& analytic, bool wrt_y) const {
    CheckSizes(x, y);
    Matrix out(n_, n_);
    if (analytic) {
      analytic(x, y, out);
      return out;
    }
    if (!allow_fd_) {
      throw Error("partial derivatives unavailable and finite differences "
                  "disabled");
    }
    const Vector& base = wrt_y ? y : x;
    const double step = 1e-6 * (1.0 + base.norm());
    Vector plus(n_), minus(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      Vector xp = x, yp = y, xm = x, ym = y;
      (wrt_y ? yp : xp)[j] += step;
      (wrt_y ? ym : xm)[j] -= step;
      f_(xp, yp, plus);
      f_(xm, ym, minus);
      out.col(j) = (plus - minus) / (2.0 * step);
    }
    return out;
  }

  std::size_t n_;
  Rational mu_;
  double h_;
  RhsFunction f_;
  JacobianFunction dfdx_;
  JacobianFunction dfdy_;
  bool allow_fd_ = true;
  std::vector<RhsTerm> terms_;
  std::shared_ptr<const ScalarFast> scalar_;
};

/// ‖f(x, y)‖ ≤ m(‖x‖^μ + ‖y‖^μ) and the analogous degree μ-1 bounds for the
/// partial derivatives with m₁ (∂/∂x) and m₂ (∂/∂y).
struct GrowthConstants {
  double m = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Delay-free Lyapunov function constants.
struct LyapunovConstants {
  double gamma = 2.0;
  double k0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double w = 0.0;
};

/// V(x), its gradient and Hessian, homogeneous of degree γ ≥ 2, with the
/// bounding constants k₀..k₃ and decay rate w.
class LyapunovData {
 public:
  using ValueFunction = std::function<double(ConstVectorRef)>;
  using GradientFunction = std::function<Vector(ConstVectorRef)>;
  using HessianFunction = std::function<Matrix(ConstVectorRef)>;

  LyapunovData(std::size_t n, LyapunovConstants constants,
               ValueFunction value, GradientFunction gradient,
               HessianFunction hessian = nullptr)
      : n_(n),
        constants_(constants),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)) {
    CheckConstants();
  }

  static LyapunovData FromPolynomial(LyapunovConstants constants,
                                     Polynomial v) {
    auto poly = std::make_shared<const Polynomial>(std::move(v));
    LyapunovData data(
        poly->variables(), constants,
        [poly](ConstVectorRef x) { return poly->Value(x); },
        [poly](ConstVectorRef x) { return poly->Gradient(x); },
        [poly](ConstVectorRef x) { return poly->Hessian(x); });
    data.polynomial_ = poly;
    return data;
  }

  std::size_t dimension() const { return n_; }
  const LyapunovConstants& constants() const { return constants_; }
  double gamma() const { return constants_.gamma; }
  std::shared_ptr<const Polynomial> polynomial() const { return polynomial_; }

  LyapunovData WithConstants(LyapunovConstants constants) const {
    LyapunovData copy = *this;
    copy.constants_ = constants;
    copy.CheckConstants();
    return copy;
  }

  double Value(ConstVectorRef x) const { return value_(x); }
  Vector Gradient(ConstVectorRef x) const { return gradient_(x); }
  Matrix Hessian(ConstVectorRef x) const {
    if (hessian_) return hessian_(x);
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix out(n, n);
    const double step = 1e-6 * (1.0 + x.norm());
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      out.col(j) = (gradient_(xp) - gradient_(xm)) / (2.0 * step);
    }
    return out;
  }

 private:
  void CheckConstants() const {
    const auto& c = constants_;
    if (!(c.gamma >= 2.0)) throw ConfigError("Lyapunov degree γ must be ≥ 2");
    if (!(c.k0 > 0 && c.k1 > 0 && c.k2 > 0 && c.k3 > 0 && c.w > 0)) {
      throw ConfigError("Lyapunov constants k0..k3 and w must be positive");
    }
    if (!(c.k0 <= c.k1)) throw ConfigError("Lyapunov constants need k0 ≤ k1");
  }

  std::size_t n_;
  LyapunovConstants constants_;
  ValueFunction value_;
  GradientFunction gradient_;
  HessianFunction hessian_;
  std::shared_ptr<const Polynomial> polynomial_;
};

/// Everything both certificate pipelines consume.
struct SystemModel {
  HomogeneousRHS rhs;
  LyapunovData lyapunov;
  GrowthConstants growth;
};

// ---------------------------------------------------------------------------
// Operations

inline Vector eval_rhs(const HomogeneousRHS& rhs, const Vector& x,
                       const Vector& y) {
  return rhs.Evaluate(x, y);
}

/// ‖f(cx, cy) − c^μ f(x, y)‖.
inline double homogeneity_defect(const HomogeneousRHS& rhs, double c,
                                 const Vector& x, const Vector& y) {
  if (!(c > 0.0)) throw Error("homogeneity_defect: c must be positive");
  const Vector scaled = rhs.Evaluate(c * x, c * y);
  const Vector base = rhs.Evaluate(x, y);
  return (scaled - std::pow(c, rhs.mu()) * base).norm();
}

inline constexpr double kGrowthSafetyFactor = 1.05;
inline constexpr std::size_t kDefaultSampleCount = 10000;

/// Largest sampled ratios ‖f‖/(‖x‖^μ+‖y‖^μ), ‖∂f/∂x‖/(‖x‖^{μ-1}+‖y‖^{μ-1}),
/// ‖∂f/∂y‖/(‖x‖^{μ-1}+‖y‖^{μ-1}). Homogeneity makes the ratios scale
/// invariant, so directions on the unit sphere of ℝ^{2n} cover the constraint
/// set ‖x‖^μ+‖y‖^μ=1.
inline GrowthConstants sample_growth_ratios(const HomogeneousRHS& rhs,
                                            std::size_t sample_count,
                                            std::size_t offset = 0) {
  if (!rhs.partials_available()) {
    throw Error("partial derivatives unavailable and finite differences "
                "disabled");
  }
  const std::size_t n = rhs.dimension();
  const double mu = rhs.mu();
  SphereSampler sampler(2 * n, offset);
  GrowthConstants maxima;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const Vector dir = sampler.Next();
    const Vector x = dir.head(n);
    const Vector y = dir.tail(n);
    const double nx = x.norm(), ny = y.norm();
    const double denom = std::pow(nx, mu) + std::pow(ny, mu);
    const double denom1 = std::pow(nx, mu - 1) + std::pow(ny, mu - 1);
    maxima.m = std::max(maxima.m, rhs.Evaluate(x, y).norm() / denom);
    maxima.m1 = std::max(maxima.m1, SpectralNorm(rhs.JacobianX(x, y)) / denom1);
    maxima.m2 = std::max(maxima.m2, SpectralNorm(rhs.JacobianY(x, y)) / denom1);
  }
  return maxima;
}

inline GrowthConstants estimate_growth_constants(
    const HomogeneousRHS& rhs, std::size_t sample_count = kDefaultSampleCount,
    double safety_factor = kGrowthSafetyFactor) {
  if (sample_count < 1000) {
    throw Error("estimate_growth_constants needs at least 1000 samples");
  }
  if (!(safety_factor >= 1.0)) throw Error("safety factor must be ≥ 1");
  GrowthConstants g = sample_growth_ratios(rhs, sample_count);
  g.m *= safety_factor;
  g.m1 *= safety_factor;
  g.m2 *= safety_factor;
  return g;
}

/// Ratio of the sampled maxima to the supplied constants; each entry ≤ 1
/// means the constant certifies its bound on the sample set.
struct GrowthCheck {
  double m_ratio = 0.0;
  double m1_ratio = 0.0;
  double m2_ratio = 0.0;
  bool passed(double tol = 1e-12) const {
    return m_ratio <= 1.0 + tol && m1_ratio <= 1.0 + tol &&
           m2_ratio <= 1.0 + tol;
  }
};

/// Re-validates growth constants (computed or user supplied) on a sample set
/// disjoint from the one used by estimate_growth_constants.
inline GrowthCheck check_growth_constants(const HomogeneousRHS& rhs,
                                          const GrowthConstants& g,
                                          std::size_t sample_count,
                                          std::size_t offset = 1000003) {
  const GrowthConstants sampled = sample_growth_ratios(rhs, sample_count,
                                                       offset);
  return {sampled.m / g.m, sampled.m1 / g.m1, sampled.m2 / g.m2};
}

/// Largest violation of each Lyapunov inequality on the unit shell ‖x‖=1.
/// Violations are reported as nonnegative numbers; zero means the bound held
/// at every sample.
struct LyapunovValidation {
  double lower = 0.0;     // k₀‖x‖^γ ≤ V(x)
  double upper = 0.0;     // V(x) ≤ k₁‖x‖^γ
  double decay = 0.0;     // ∇V·f(x,x) ≤ -w‖x‖^{γ+μ-1}
  double gradient = 0.0;  // ‖∇V‖ ≤ k₂‖x‖^{γ-1}
  double hessian = 0.0;   // ‖∇²V‖ ≤ k₃‖x‖^{γ-2}
  std::size_t samples = 0;

  double worst() const {
    return std::max({lower, upper, decay, gradient, hessian});
  }
  bool passed(double tol = 1e-12) const { return worst() <= tol; }
};

inline LyapunovValidation validate_lyapunov(const LyapunovData& lyap,
                                            const HomogeneousRHS& rhs,
                                            std::size_t sample_count =
                                                kDefaultSampleCount,
                                            std::size_t offset = 0) {
  const auto& c = lyap.constants();
  if (!(c.gamma >= 2.0)) throw Error("validate_lyapunov requires γ ≥ 2");
  if (lyap.dimension() != rhs.dimension()) {
    throw DimensionError("Lyapunov function and system dimensions differ");
  }
  SphereSampler sampler(rhs.dimension(), offset);
  LyapunovValidation report;
  report.samples = sample_count;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const Vector x = sampler.Next();
    const double v = lyap.Value(x);
    const Vector grad = lyap.Gradient(x);
    report.lower = std::max(report.lower, c.k0 - v);
    report.upper = std::max(report.upper, v - c.k1);
    report.decay = std::max(report.decay, grad.dot(rhs.Evaluate(x, x)) + c.w);
    report.gradient = std::max(report.gradient, grad.norm() - c.k2);
    report.hessian =
        std::max(report.hessian, SpectralNorm(lyap.Hessian(x)) - c.k3);
  }
  return report;
}

}  // namespace homdelay
