#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "homdelay/errors.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/model.hpp"
#include "homdelay/razumikhin.hpp"

namespace homdelay {

/// Built-in examples.
///   ex1: ẋ = α₁x³ + α₂x³(t-h), V = x².
///   ex2: ẋ₁ = x₂^μ, ẋ₂ = -x₁^μ - x₂^μ(t-h),
///        V = (x₁^{μ+1} + x₂^{μ+1})/(μ+1) + ζx₁^μx₂.
struct ExampleSpec {
  std::string id = "ex1";
  double alpha1 = -1.0;
  double alpha2 = 0.5;
  double zeta = 0.1;
  Rational mu = 3;
  /// Defaults to 10 (ex1) or 1 (ex2).
  std::optional<double> h;

  double delay() const { return h.value_or(id == "ex1" ? 10.0 : 1.0); }
};

/// η = min{ζ, 1-ζ(μ+1), (ζ/(1+ζ))(1-ζ(1+μ)²/4)} for ex2.
inline double example2_eta(double zeta, double mu) {
  return std::min({zeta, 1.0 - zeta * (mu + 1.0),
                   (zeta / (1.0 + zeta)) *
                       (1.0 - zeta * (1.0 + mu) * (1.0 + mu) / 4.0)});
}

inline SystemModel build_example(const ExampleSpec& spec) {
  const double h = spec.delay();
  if (spec.id == "ex1") {
    if (!(spec.alpha1 + spec.alpha2 < 0.0)) {
      throw ConfigError("ex1 requires alpha1 + alpha2 < 0");
    }
    const Rational three(3);
    auto rhs = HomogeneousRHS::FromTerms(
        1, three, h,
        {{0, spec.alpha1, {three}, {Rational(0)}},
         {0, spec.alpha2, {Rational(0)}, {three}}});
    LyapunovConstants lc;
    lc.gamma = 2.0;
    lc.k0 = lc.k1 = 1.0;
    lc.k2 = lc.k3 = 2.0;
    lc.w = -2.0 * (spec.alpha1 + spec.alpha2);
    auto lyap = LyapunovData::FromPolynomial(
        lc, Polynomial(1, {{1.0, {Rational(2)}}}));
    GrowthConstants g{std::max(std::abs(spec.alpha1), std::abs(spec.alpha2)),
                      3.0 * std::abs(spec.alpha1), 3.0 * std::abs(spec.alpha2)};
    return {std::move(rhs), std::move(lyap), g};
  }
  if (spec.id == "ex2") {
    const double mu = spec.mu.value();
    const double z = spec.zeta;
    if (!(spec.mu.is_odd() && mu > 1.0)) {
      throw ConfigError("ex2 requires an odd rational mu > 1");
    }
    if (!(z > 0.0 && z < std::min(1.0 / (mu + 1.0),
                                  4.0 / ((mu + 1.0) * (mu + 1.0))))) {
      throw ConfigError("ex2 requires 0 < zeta < min{1/(mu+1), 4/(mu+1)^2}");
    }
    const Rational zero(0), one(1);
    const Rational m = spec.mu;
    auto rhs = HomogeneousRHS::FromTerms(
        2, m, h,
        {{0, 1.0, {zero, m}, {zero, zero}},
         {1, -1.0, {m, zero}, {zero, zero}},
         {1, -1.0, {zero, zero}, {zero, m}}});
    const double eta = example2_eta(z, mu);
    LyapunovConstants lc;
    lc.gamma = mu + 1.0;
    lc.w = eta / std::pow(2.0, mu - 1.0);
    lc.k0 = std::pow(0.5, (mu - 1.0) / 2.0) * (1.0 / (mu + 1.0) - z);
    lc.k1 = 1.0 / (mu + 1.0) + z;
    lc.k2 = std::sqrt((1.0 + z * mu) * (1.0 + z * mu) + (1.0 + z) * (1.0 + z));
    lc.k3 = mu * (1.0 + z * mu);
    const Rational mu1 = m + one;
    auto lyap = LyapunovData::FromPolynomial(
        lc, Polynomial(2, {{1.0 / (mu + 1.0), {mu1, zero}},
                           {1.0 / (mu + 1.0), {zero, mu1}},
                           {z, {m, one}}}));
    GrowthConstants g{std::sqrt(2.0), mu, mu};
    return {std::move(rhs), std::move(lyap), g};
  }
  throw ConfigError("unknown example '" + spec.id + "' (expected ex1|ex2)");
}

/// Parameter set for one table of constants, or the figure runs.
struct Preset {
  std::string name;
  ExampleSpec example;
  RazumikhinParams razumikhin;
  KrasovskiiParams krasovskii;
  /// Constant initial function used by the figure runs.
  Vector phi;
  double horizon = 0.0;
};

inline Preset preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "table1") {
    p.example.id = "ex1";
    p.razumikhin.alpha = 2.0;
    p.krasovskii.path = KrasovskiiPath::kScalar;
    p.krasovskii.chi = 0.32;
    p.krasovskii.w1 = 0.05;
    p.krasovskii.w2 = 0.07;
    p.krasovskii.delta = 0.1011;
    p.phi = Vector::Constant(1, 0.009);
    p.horizon = 1e6;
  } else if (name == "table2") {
    p.example.id = "ex1";
    p.razumikhin.alpha = 2.0;
    p.razumikhin.delta = 0.01;
    p.krasovskii.path = KrasovskiiPath::kScalar;
    p.krasovskii.chi = 0.015;
    p.krasovskii.w1 = 0.5;
    p.krasovskii.w2 = 0.017;
    p.krasovskii.delta = 0.01;
    p.phi = Vector::Constant(1, 0.009);
    p.horizon = 1e6;
  } else if (name == "table3") {
    p.example.id = "ex2";
    p.razumikhin.alpha = 2.0;
    p.razumikhin.delta = 0.001;
    p.krasovskii.path = KrasovskiiPath::kGeneral;
    p.krasovskii.chi = 0.39;
    p.krasovskii.w1 = 0.0092;
    p.krasovskii.w2 = 0.0022;
    p.krasovskii.delta = 0.001;
    p.phi = Vector::Constant(2, 4.8e-4);
    p.horizon = 1e4;
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected table1|table2|table3)");
  }
  return p;
}

/// Estimate preset for an example id: table2 for ex1, table3 for ex2.
inline Preset estimate_preset(const std::string& example_id) {
  if (example_id == "ex1") return preset("table2");
  if (example_id == "ex2") return preset("table3");
  throw ConfigError("unknown example '" + example_id + "'");
}

}  // namespace homdelay
